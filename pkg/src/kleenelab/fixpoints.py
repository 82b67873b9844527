"""Fixed points of computable code transforms, with bounded verification.

fixpoint(t) returns a code e* whose behavior equals that of the code t
produces from e* itself.  The construction is the classic diagonal: the
program d, given a code w, runs t on the specialized code smn(w, w) and
applies the result; e* = smn(d, d) then unfolds to t applied to e* itself.
Nothing is evaluated at construction time, so e* always exists; if t
diverges on e*, then e* diverges everywhere.

fixpoint_param(h) is the uniform version: it returns one total code f with
phi_{f(n)} = phi_{h(<n, f(n)>)} for every n.  f(n) specializes a single
doubly-diagonal code E, so building and applying f never runs h; all the
work happens inside the returned codes when they are themselves run.

Verification is extensional on finite grids: two codes agree at a point if
both converge to the same value or both exhaust the budget.  That is the
honest testable surface of an equality of partial functions.
"""

from dataclasses import dataclass
from typing import Tuple

from .interp import eval_code
from .lang import Code, ID, LEFT, RIGHT, apply, comp, const, encode, pair, \
    pair_of, smn, smn_node

BOTH_CONVERGED_EQUAL = "both-converged-equal"
BOTH_EXHAUSTED = "both-exhausted"
DISAGREE = "disagree"
TRANSFORM_DIVERGED = "transform-diverged"

_AGREEMENT = (BOTH_CONVERGED_EQUAL, BOTH_EXHAUSTED)

# applying the f returned by fixpoint_param costs a fixed handful of steps
# (one smn specialization), independent of n and of h
PARAM_F_BUDGET = 16


@dataclass(frozen=True)
class FixedPointReport:
    """Grid-level comparison of a claimed fixed point against its transform."""

    fixed_code: Code
    transform_code: Code
    grid: Tuple[Tuple[int, int], ...]
    agreements: Tuple[Tuple[int, str], ...]
    verified: bool

    def to_dict(self) -> dict:
        return {
            "fixed_code": self.fixed_code,
            "transform_code": self.transform_code,
            "grid": [list(p) for p in self.grid],
            "agreements": [[y, c] for y, c in self.agreements],
            "verified": self.verified,
        }


@dataclass(frozen=True)
class ParamFixedPointReport:
    f_code: Code
    h_code: Code
    n_range: Tuple[int, ...]
    per_n: Tuple[FixedPointReport, ...]

    @property
    def verified(self) -> bool:
        return all(r.verified for r in self.per_n)

    def to_dict(self) -> dict:
        return {
            "f_code": self.f_code,
            "h_code": self.h_code,
            "n_range": list(self.n_range),
            "per_n": [r.to_dict() for r in self.per_n],
            "verified": self.verified,
        }


def fixpoint(t: Code) -> Code:
    """A code e* with phi_{e*} = phi_{t(e*)} whenever t converges on e*."""
    d = encode(apply(apply(const(t), smn_node(LEFT, LEFT)), RIGHT))
    return smn(d, d)


def fixpoint_param(h: Code) -> Code:
    """A total code f with phi_{f(n)} = phi_{h(<n, f(n)>)} for every n.

    The inner code E receives <d, <n, y>>; it rebuilds f(n) = smn(smn(d,d), n)
    from its own first component, hands <n, f(n)> to h, and applies the
    code h returns to y.  f itself just specializes E to n.
    """
    xE = LEFT
    nE = comp(LEFT, RIGHT)
    yE = comp(RIGHT, RIGHT)
    d2 = encode(apply(
        apply(const(h), pair_of(nE, smn_node(smn_node(xE, xE), nE))),
        yE,
    ))
    big_e = smn(d2, d2)
    return encode(smn_node(const(big_e), ID))


def classify_point(code_a: Code, code_b: Code, y: int, budget: int,
                   oracle=None) -> str:
    """Extensional comparison at one grid point; symmetric in the codes."""
    ra = eval_code(code_a, y, budget, oracle)
    rb = eval_code(code_b, y, budget, oracle)
    if ra.converged and rb.converged:
        return BOTH_CONVERGED_EQUAL if ra.value == rb.value else DISAGREE
    if not ra.converged and not rb.converged:
        return BOTH_EXHAUSTED
    return DISAGREE


def verify_fixed_point(e: Code, t: Code, grid, oracle=None) -> FixedPointReport:
    """Compare phi_e with phi_{t(e)} on the grid.

    A point where t itself exhausts its budget is classified
    transform-diverged: untestable there, and not counted as agreement.
    """
    grid = tuple((int(y), int(b)) for y, b in grid)
    transformed = {}
    agreements = []
    for y, b in grid:
        if b not in transformed:
            transformed[b] = eval_code(t, e, b)
        rt = transformed[b]
        if not rt.converged:
            agreements.append((y, TRANSFORM_DIVERGED))
            continue
        agreements.append((y, classify_point(e, rt.value, y, b, oracle)))
    verified = all(c in _AGREEMENT for _, c in agreements)
    return FixedPointReport(
        fixed_code=e,
        transform_code=t,
        grid=grid,
        agreements=tuple(agreements),
        verified=verified,
    )


def verify_param_fixed_point(f: Code, h: Code, n_range, grid,
                             f_budget: int = PARAM_F_BUDGET,
                             oracle=None) -> ParamFixedPointReport:
    """Check phi_{f(n)} = phi_{h(<n, f(n)>)} per n, extensionally on the grid.

    f must converge on every n in n_range within f_budget (it does, in a
    fixed handful of steps, when f came out of fixpoint_param).
    """
    n_range = tuple(int(n) for n in n_range)
    grid = tuple((int(y), int(b)) for y, b in grid)
    reports = []
    for n in n_range:
        rf = eval_code(f, n, f_budget)
        if not rf.converged:
            raise ValueError(f"f did not converge on {n} within {f_budget} steps")
        fn = rf.value
        agreements = []
        for y, b in grid:
            rh = eval_code(h, pair(n, fn), b)
            if not rh.converged:
                agreements.append((y, TRANSFORM_DIVERGED))
                continue
            agreements.append((y, classify_point(fn, rh.value, y, b, oracle)))
        verified = all(c in _AGREEMENT for _, c in agreements)
        reports.append(FixedPointReport(
            fixed_code=fn,
            transform_code=h,
            grid=grid,
            agreements=tuple(agreements),
            verified=verified,
        ))
    return ParamFixedPointReport(
        f_code=f, h_code=h, n_range=n_range, per_n=tuple(reports),
    )
