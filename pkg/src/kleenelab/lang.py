"""Core object language: syntax trees, program numbering, pairing.

Programs denote unary partial functions over the naturals.  A program is a
small syntax tree; every tree has a unique code number and every natural
number decodes to exactly one tree, so "program" and "natural number" are
interchangeable everywhere in the workbench.

Constructors
------------
Nullary:   identity, successor, left / right projection of a coded pair.
Payload:   const c            -- ignore the input, return c
           mu B               -- least y with B(<y, x>) = 0, searched upward
           query P            -- oracle bit at position P(x) (0 without oracle)
           pair P Q           -- <P(x), Q(x)>
           comp P Q           -- P(Q(x))
           apply C A          -- run the program coded by C(x) on input A(x)
           smn E X            -- the code of program E(x) specialized to
                                 first argument X(x) (constant substitution
                                 plus composition, done in one transition)
           eq P Q             -- 0 if P(x) = Q(x) else 1
           ifz G P Q          -- P(x) if G(x) = 0 else Q(x)
           try C A B          -- bounded run of program C(x) on A(x) with
                                 step budget B(x): value v+1 on convergence
                                 within the budget, 0 otherwise (total)

`apply` makes universality internal, `try` makes bounded halting tests
internal, `smn` makes code specialization internal.  All three are needed to
express the dovetailing and self-referential programs the higher layers
build; without them those programs would have to do unary arithmetic on code
numbers, which no step budget of this scale survives.

Pairing is the Cantor bijection <x,y> = (x+y)(x+y+1)/2 + y.  Triples nest to
the right: <x,y,z> = <x,<y,z>>.
"""

from __future__ import annotations

from math import isqrt
from typing import Iterator, Optional

try:
    # pairing arithmetic on the codes this package builds runs far past
    # native word sizes; GMP's isqrt and multiplication are an order of
    # magnitude faster there, while plain ints stay fastest below _BIG
    from gmpy2 import isqrt as _gmp_isqrt, mpz as _mpz
except ImportError:
    _gmp_isqrt = isqrt
    _mpz = int

_BIG = 1 << 8192

Code = int  # program code numbers are plain naturals

# node tags
T_ID = 0
T_SUCC = 1
T_LEFT = 2
T_RIGHT = 3
T_CONST = 4
T_MU = 5
T_QUERY = 6
T_PAIR = 7
T_COMP = 8
T_APPLY = 9
T_SMN = 10
T_EQ = 11
T_IFZ = 12
T_TRY = 13

TAG_NAMES = {
    T_ID: "id",
    T_SUCC: "succ",
    T_LEFT: "left",
    T_RIGHT: "right",
    T_CONST: "const",
    T_MU: "mu",
    T_QUERY: "query",
    T_PAIR: "pair",
    T_COMP: "comp",
    T_APPLY: "apply",
    T_SMN: "smn",
    T_EQ: "eq",
    T_IFZ: "ifz",
    T_TRY: "try",
}

# payload classes in numbering order; nullary tags take codes 0..3 directly
_PAYLOAD_ORDER = (T_CONST, T_MU, T_QUERY, T_PAIR, T_COMP, T_APPLY, T_SMN,
                  T_EQ, T_IFZ, T_TRY)
_PAYLOAD_CLASS = {tag: r for r, tag in enumerate(_PAYLOAD_ORDER)}
_NULLARY = (T_ID, T_SUCC, T_LEFT, T_RIGHT)
_N_CLASSES = len(_PAYLOAD_ORDER)


def pair(x: int, y: int) -> int:
    """Cantor pairing <x,y> = (x+y)(x+y+1)/2 + y."""
    s = x + y
    if s < _BIG:
        return s * (s + 1) // 2 + y
    s = _mpz(s)
    return int(s * (s + 1) // 2 + y)


def unpair(z: int) -> tuple[int, int]:
    """Inverse of pair; total on the naturals."""
    if z < _BIG:
        w = (isqrt(8 * z + 1) - 1) // 2
        y = z - w * (w + 1) // 2
        return w - y, y
    w = (_gmp_isqrt(_mpz(8) * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return int(w - y), int(y)


def triple(x: int, y: int, z: int) -> int:
    return pair(x, pair(y, z))


def untriple(n: int) -> tuple[int, int, int]:
    x, rest = unpair(n)
    y, z = unpair(rest)
    return x, y, z


# ---------------------------------------------------------------------------
# tree builders (nodes are plain tuples, cheap for the evaluator to consume)

ID = (T_ID,)
SUCC = (T_SUCC,)
LEFT = (T_LEFT,)
RIGHT = (T_RIGHT,)


def const(c: int):
    return (T_CONST, c)


def mu(body):
    return (T_MU, body)


def query(p):
    return (T_QUERY, p)


def pair_of(p, q):
    return (T_PAIR, p, q)


def comp(p, q):
    return (T_COMP, p, q)


def apply(c, a):
    return (T_APPLY, c, a)


def smn_node(e, x):
    return (T_SMN, e, x)


def eq(p, q):
    return (T_EQ, p, q)


def ifz(g, p, q):
    return (T_IFZ, g, p, q)


def try_(c, a, b):
    return (T_TRY, c, a, b)


def children(node) -> tuple:
    return node[1:] if node[0] != T_CONST else ()


# ---------------------------------------------------------------------------
# numbering: a total bijection between naturals and trees.
#
# code 0..3        -> the four nullary constructors
# code 4 + 10q + r -> payload class r applied to payload number q, where a
#                     1-ary payload is a sub-code, a 2-ary payload is a coded
#                     pair of sub-codes and a 3-ary payload a coded triple.
# Each branch is a bijection, so decode is total and encode inverts it.

_decode_cache: dict[int, tuple] = {}
_DECODE_CACHE_LIMIT = 1 << 20


def decode(code: Code):
    """Total: every natural is a runnable program."""
    node = _decode_cache.get(code)
    if node is not None:
        return node
    if len(_decode_cache) > _DECODE_CACHE_LIMIT:
        _decode_cache.clear()
    # iterative worklist; children resolve before parents
    stack = [code]
    while stack:
        c = stack[-1]
        if c in _decode_cache:
            stack.pop()
            continue
        if c < 4:
            _decode_cache[c] = ((T_ID,), (T_SUCC,), (T_LEFT,), (T_RIGHT,))[c]
            stack.pop()
            continue
        q, r = divmod(c - 4, _N_CLASSES)
        tag = _PAYLOAD_ORDER[r]
        if tag == T_CONST:
            _decode_cache[c] = (T_CONST, q)
            stack.pop()
            continue
        if tag in (T_MU, T_QUERY):
            subs = (q,)
        elif tag in (T_IFZ, T_TRY):
            a, rest = unpair(q)
            b, d = unpair(rest)
            subs = (a, b, d)
        else:
            subs = unpair(q)
        missing = [s for s in subs if s not in _decode_cache]
        if missing:
            stack.extend(missing)
            continue
        _decode_cache[c] = (tag,) + tuple(_decode_cache[s] for s in subs)
        stack.pop()
    return _decode_cache[code]


def encode(node) -> Code:
    """Inverse of decode."""
    tag = node[0]
    if tag in (T_ID, T_SUCC, T_LEFT, T_RIGHT):
        return tag
    if tag == T_CONST:
        q = node[1]
    elif tag in (T_MU, T_QUERY):
        q = encode(node[1])
    elif tag in (T_IFZ, T_TRY):
        q = pair(encode(node[1]), pair(encode(node[2]), encode(node[3])))
    else:
        q = pair(encode(node[1]), encode(node[2]))
    return 4 + _N_CLASSES * q + _PAYLOAD_CLASS[tag]


def smn(e: Code, x: int) -> Code:
    """Code of program e specialized to first argument x.

    The returned program feeds <x, y> to program e:
        run(smn(e, x), y) = run(e, <x, y>)
    with exactly SMN_OVERHEAD extra steps on top of e's own work.  Computed
    arithmetically (constant substitution plus composition on code numbers);
    no tree is built.
    """
    const_x = 4 + _N_CLASSES * x + _PAYLOAD_CLASS[T_CONST]
    pair_part = 4 + _N_CLASSES * pair(const_x, T_ID) + _PAYLOAD_CLASS[T_PAIR]
    return 4 + _N_CLASSES * pair(e, pair_part) + _PAYLOAD_CLASS[T_COMP]


# exact step overhead of the smn wrapper: comp dispatch, pair dispatch,
# const, id, pair join, comp join
SMN_OVERHEAD = 6


# ---------------------------------------------------------------------------
# small program library used across the workbench

LOOP = mu(const(1))  # searches for 1 = 0: diverges on every input


def loop_code() -> Code:
    """A program with empty domain."""
    return encode(LOOP)


def const_code(c: int) -> Code:
    """A program computing the constant function x -> c."""
    return encode(const(c))


def identity_code() -> Code:
    return encode(ID)


# canonical nonempty-domain program: converges exactly on input 0 (value 0)
NONEMPTY_CANONICAL = ifz(ID, const(0), LOOP)


def nonempty_canonical_code() -> Code:
    """The canonical program with domain {0}."""
    return encode(NONEMPTY_CANONICAL)


def delayed_domain(delay: int):
    """A program with domain {0} that converges only after ~3*delay steps.

    Useful where a nonempty domain must exist but stay invisible to early
    stage approximations.
    """
    slow = mu(ifz(eq(LEFT, const(delay)), const(0), const(1)))
    return ifz(ID, slow, LOOP)


def delayed_domain_code(delay: int) -> Code:
    return encode(delayed_domain(delay))


# pred: total, pred(0) = 0; linear-time in its argument
PRED = ifz(ID, const(0), mu(eq(comp(SUCC, LEFT), RIGHT)))


def min_of(a_tree, b_tree):
    """min over two subexpressions of the current input, as a search.

    a_tree and b_tree are trees over the enclosing input x; the search walks
    j = 0, 1, ... until j equals one of them, so the whole thing stays a
    first-order tree with no code self-reference.
    """
    return mu(ifz(eq(LEFT, comp(a_tree, RIGHT)),
                  const(0),
                  eq(LEFT, comp(b_tree, RIGHT))))


def leq(a_tree, b_tree):
    """0 if a <= b else 1, via min_of.  Trees over the enclosing input."""
    return eq(min_of(a_tree, b_tree), a_tree)


# add(<a, b>) = a + b.
#
# The pair of the two arguments is itself the input number z = pair(a, b),
# and pair(0, m) is the last index on anti-diagonal m, so a + b is the least
# m with z <= pair(0, m).  Runs in O((a+b)^3) machine steps.
ADD = mu(leq(RIGHT, pair_of(const(0), LEFT)))


def add_code() -> Code:
    """add(<a,b>) = a + b.  Cost grows with (a+b)^3; meant for small values."""
    return encode(ADD)
