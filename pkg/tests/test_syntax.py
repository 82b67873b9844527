"""Surface syntax: parsing, printing, splices, and error positions."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleenelab.lang import (ID, LEFT, LOOP, RIGHT, SUCC, comp, const, encode,
                            eq, ifz, loop_code, mu, pair_of, query, smn_node,
                            try_)
from kleenelab.syntax import (SurfaceSyntaxError, parse_code, parse_program,
                              print_program)


class TestParse:
    def test_atoms(self):
        assert parse_program("id") == ID
        assert parse_program("  succ ") == SUCC
        assert parse_program("left") == LEFT
        assert parse_program("right") == RIGHT

    def test_forms(self):
        assert parse_program("(const 12)") == const(12)
        assert parse_program("(mu (const 1))") == LOOP
        assert parse_program("(pair id succ)") == pair_of(ID, SUCC)
        assert parse_program("(comp succ succ)") == comp(SUCC, SUCC)
        assert parse_program("(eq left (const 2))") == eq(LEFT, const(2))
        assert parse_program("(ifz id (const 0) (mu (const 1)))") == \
            ifz(ID, const(0), LOOP)
        assert parse_program("(try (const 0) id (const 9))") == \
            try_(const(0), ID, const(9))
        assert parse_program("(smn id (const 7))") == smn_node(ID, const(7))
        assert parse_program("(query succ)") == query(SUCC)

    def test_whitespace_is_free(self):
        assert parse_program("(pair\n  id\n  succ)") == pair_of(ID, SUCC)

    def test_splice_is_decode(self):
        assert parse_program("#145") == LOOP
        assert parse_program(f"#{loop_code()}") == LOOP
        assert parse_program("(comp #2 (pair id succ))") == \
            comp(LEFT, pair_of(ID, SUCC))

    def test_parse_code_encodes(self):
        assert parse_code("(mu (const 1))") == loop_code()
        assert parse_code("id") == 0


class TestErrors:
    @pytest.mark.parametrize("text,position,fragment", [
        ("", 0, "empty program"),
        ("(pair id succ", 13, "expected ')'"),
        ("(pair id", 8, "unexpected end of program"),
        ("(pair id succ) id", 15, "trailing text"),
        ("mu", 0, "'mu' takes arguments"),
        ("7", 0, "bare number"),
        ("(const id)", 7, "const takes a number literal"),
        ("(widget id)", 1, "expected a constructor name"),
        ("frobnicate", 0, "unknown name 'frobnicate'"),
        ("(pair id succ]", 13, "unexpected character"),
        ("#", 0, "expected digits after '#'"),
        (")", 0, "unexpected ')'"),
        ("(pair id ))", 9, "unexpected ')'"),
        ("(mu", 3, "unexpected end of program"),
    ])
    def test_position_and_message(self, text, position, fragment):
        with pytest.raises(SurfaceSyntaxError) as exc:
            parse_program(text)
        assert exc.value.position == position
        assert fragment in str(exc.value)
        assert f"position {position}" in str(exc.value)

    def test_close_paren_error_names_the_open_position(self):
        with pytest.raises(SurfaceSyntaxError) as exc:
            parse_program("(comp (pair id succ) id")
        assert "closing the form at position 0" in str(exc.value)
        assert exc.value.position == 23


_leaves = st.sampled_from([ID, SUCC, LEFT, RIGHT]) | \
    st.integers(0, 500).map(const)


def _extend(sub):
    return st.one_of(
        sub.map(mu),
        sub.map(query),
        st.tuples(sub, sub).map(lambda p: pair_of(*p)),
        st.tuples(sub, sub).map(lambda p: comp(*p)),
        st.tuples(sub, sub).map(lambda p: smn_node(*p)),
        st.tuples(sub, sub).map(lambda p: eq(*p)),
        st.tuples(sub, sub, sub).map(lambda p: ifz(*p)),
        st.tuples(sub, sub, sub).map(lambda p: try_(*p)),
    )


@given(st.recursive(_leaves, _extend, max_leaves=25))
@settings(max_examples=250, deadline=None)
def test_print_parse_round_trip(tree):
    assert parse_program(print_program(tree)) == tree


@given(st.integers(0, 10 ** 12))
@settings(max_examples=150, deadline=None)
def test_printing_a_decoded_code_round_trips(code):
    from kleenelab.lang import decode
    assert parse_code(print_program(decode(code))) == code
