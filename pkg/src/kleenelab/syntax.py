"""Surface syntax for programs.

S-expressions over the node constructors, with raw code splices:

    (ifz id (const 0) (mu (const 1)))      a tree, spelled out
    #640881812                             the program with that code number
    (comp #2 (pair id succ))               both, mixed freely

Atoms are id, succ, left, right.  A splice #n parses to the tree decode(n),
so everything after parsing is an ordinary node.  Printing always spells
trees out structurally; parse(print_program(t)) == t for every tree t.
"""

from typing import List, Tuple

from .lang import (Code, T_APPLY, T_COMP, T_CONST, T_EQ, T_ID, T_IFZ, T_LEFT,
                   T_MU, T_PAIR, T_QUERY, T_RIGHT, T_SMN, T_SUCC, T_TRY,
                   decode, encode)


class SurfaceSyntaxError(ValueError):
    """Malformed program text; position is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"position {position}: {message}")
        self.position = position


_ATOMS = {"id": (T_ID,), "succ": (T_SUCC,), "left": (T_LEFT,),
          "right": (T_RIGHT,)}

_HEADS = {"const": (T_CONST, 1), "mu": (T_MU, 1), "query": (T_QUERY, 1),
          "pair": (T_PAIR, 2), "comp": (T_COMP, 2), "apply": (T_APPLY, 2),
          "smn": (T_SMN, 2), "eq": (T_EQ, 2), "ifz": (T_IFZ, 3),
          "try": (T_TRY, 3)}

_NAMES = {T_ID: "id", T_SUCC: "succ", T_LEFT: "left", T_RIGHT: "right",
          T_CONST: "const", T_MU: "mu", T_QUERY: "query", T_PAIR: "pair",
          T_COMP: "comp", T_APPLY: "apply", T_SMN: "smn", T_EQ: "eq",
          T_IFZ: "ifz", T_TRY: "try"}


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            toks.append((c, c, i))
            i += 1
        elif c == "#":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise SurfaceSyntaxError("expected digits after '#'", i)
            toks.append(("splice", text[i + 1:j], i))
            i = j
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("number", text[i:j], i))
            i = j
        elif c.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            toks.append(("symbol", text[i:j], i))
            i = j
        else:
            raise SurfaceSyntaxError(f"unexpected character {c!r}", i)
    return toks


def parse_program(text: str):
    """Parse surface text to a node tree; raises SurfaceSyntaxError."""
    toks = _tokenize(text)
    if not toks:
        raise SurfaceSyntaxError("empty program", 0)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, "", len(text))

    def expr():
        nonlocal pos
        kind, val, at = peek()
        if kind is None:
            raise SurfaceSyntaxError("unexpected end of program", at)
        if kind == "splice":
            pos += 1
            return decode(int(val))
        if kind == "symbol":
            if val not in _ATOMS:
                if val in _HEADS:
                    raise SurfaceSyntaxError(
                        f"'{val}' takes arguments; write ({val} ...)", at)
                raise SurfaceSyntaxError(f"unknown name '{val}'", at)
            pos += 1
            return _ATOMS[val]
        if kind == "number":
            raise SurfaceSyntaxError(
                "bare number; write (const n) or a #n splice", at)
        if kind == ")":
            raise SurfaceSyntaxError("unexpected ')'", at)
        # kind == "("
        open_at = at
        pos += 1
        hkind, hval, hat = peek()
        if hkind != "symbol" or hval not in _HEADS:
            raise SurfaceSyntaxError("expected a constructor name after '('",
                                     hat)
        tag, arity = _HEADS[hval]
        pos += 1
        args = []
        if tag == T_CONST:
            nkind, nval, nat = peek()
            if nkind != "number":
                raise SurfaceSyntaxError("const takes a number literal", nat)
            args.append(int(nval))
            pos += 1
        else:
            for _ in range(arity):
                args.append(expr())
        ckind, _, cat = peek()
        if ckind != ")":
            raise SurfaceSyntaxError(
                f"expected ')' closing the form at position {open_at}", cat)
        pos += 1
        return (tag,) + tuple(args)

    node = expr()
    kind, _, at = peek()
    if kind is not None:
        raise SurfaceSyntaxError("trailing text after program", at)
    return node


def parse_code(text: str) -> Code:
    return encode(parse_program(text))


def print_program(node) -> str:
    """Structural rendering; inverse of parse_program on its image."""
    tag = node[0]
    name = _NAMES[tag]
    if len(node) == 1:
        return name
    if tag == T_CONST:
        return f"(const {node[1]})"
    inner = " ".join(print_program(c) for c in node[1:])
    return f"({name} {inner})"
