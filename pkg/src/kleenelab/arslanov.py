"""Fixed-point candidate search against a stage-approximated function.

A candidate function is supplied as a binary code fhat on pair(x, s): its
value at x once s steps of approximation are allowed.  build_h turns fhat
into one total code h whose value at n behaves, whenever the diagonal
computation of n halts, like fhat evaluated at h(n) itself with the
approximation budget settled at that halting time:

    phi_{h(n)} = phi_{fhat(h(n), t_n)}    where t_n = least budget with
                                          program n halting on input n

For an fhat that ignores s (a genuinely computable function f of codes)
this makes every halting n a fixed-point candidate with
phi_{h(n)} = phi_{f(h(n))}; the search enumerates halting n in order of
entry and probes how the domains of h(n) and fhat(h(n), s) compare on a
finite grid at the current stage.

The settling budget on the object side is t_n, the minimal halting
budget, while the recorded entry stage s_n is max(n, t_n): the first
stage whose bounded halting set contains n.  An fhat constant in s cannot
tell them apart; s-sensitive candidates see the difference documented
here rather than hidden.

Domain comparison is stagewise and symmetric, so probe verdicts are
provisional observations, never permanence claims.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .fixpoints import PARAM_F_BUDGET, fixpoint_param
from .interp import eval_code
from .lang import (Code, ID, LEFT, RIGHT, apply, comp, const, encode, ifz,
                   mu, pair, pair_of, smn_node, try_)
from .notions import STANDARD_GRID
from .stages import HaltingLedger

# budget for evaluating h itself: one specialization step plus slack
H_BUDGET = PARAM_F_BUDGET

# budget for host-side evaluations of fhat during probing
FHAT_BUDGET = 10 ** 4

# probing every halting n is quadratic pain for zero insight; the earliest
# entries are the cheap ones and the interesting ones
PROBE_CAP = 64


def build_h(fhat: Code) -> Code:
    """The uniform candidate map for fhat, via the parameterized fixed point.

    The body below runs with input pair(pair(n, x), y), where x is the
    candidate code the fixed-point machinery feeds back and y is the
    eventual argument.  `settle` scans budgets t = 0, 1, ... and stops at
    the first letting program n halt on input n, so it diverges exactly
    when that diagonal never halts (leaving the whole domain empty).
    """
    n_in_scan = comp(comp(LEFT, LEFT), RIGHT)   # pair(t, input) -> n
    settle = mu(ifz(try_(n_in_scan, n_in_scan, LEFT),
                    const(1), const(0)))
    x_of = comp(RIGHT, LEFT)
    body = apply(apply(const(fhat), pair_of(x_of, settle)), RIGHT)
    specialize = smn_node(const(encode(body)), ID)
    return fixpoint_param(encode(specialize))


@dataclass(frozen=True)
class CandidateProbe:
    """Grid comparison of one candidate's domain against fhat's at stage s."""

    n: int
    s_n: int
    candidate: Code
    f_value: Optional[Code]
    points: Tuple[Tuple[int, int, bool, bool], ...]  # (y, budget, in_h, in_f)
    full_agreement: bool
    status: str  # "ok" | "fhat-diverged"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s_n": self.s_n,
            "candidate": self.candidate,
            "f_value": self.f_value,
            "points": [list(p) for p in self.points],
            "full_agreement": self.full_agreement,
            "status": self.status,
        }


@dataclass(frozen=True)
class ArslanovRun:
    fhat_code: Code
    h_code: Code
    stage: int
    candidates: Tuple[Tuple[int, int, Code], ...]  # (n, s_n, h(n))
    probes: Tuple[CandidateProbe, ...]

    def to_dict(self) -> dict:
        return {
            "fhat_code": self.fhat_code,
            "h_code": self.h_code,
            "stage": self.stage,
            "candidates": [list(c) for c in self.candidates],
            "probes": [p.to_dict() for p in self.probes],
        }


def h_value(h_code: Code, n: int) -> Code:
    out = eval_code(h_code, n, H_BUDGET)
    if not out.converged:
        raise RuntimeError(f"candidate map failed to settle at {n}; "
                           f"it is total by construction")
    return out.value


def run_search(fhat: Code, max_stage: int, probe_grid=None,
               probe_cap: int = PROBE_CAP,
               ledger: Optional[HaltingLedger] = None,
               fhat_budget: int = FHAT_BUDGET) -> ArslanovRun:
    """Enumerate halting-diagonal entries up to max_stage and probe them.

    Candidates are recorded in entry order (s_n, then n) with their h
    values; the first probe_cap get a full grid comparison between the
    domain of h(n) and the domain of fhat(h(n), max_stage).  A shared
    ledger makes repeated searches over one stage horizon incremental.
    Deterministic: same arguments, same run, bit for bit.
    """
    if max_stage < 0:
        raise ValueError("max_stage must be nonnegative")
    if probe_grid is None:
        probe_grid = STANDARD_GRID
    grid = tuple((int(y), int(b)) for y, b in probe_grid)
    h_code = build_h(fhat)
    if ledger is None:
        ledger = HaltingLedger()
    ledger.advance_to(max_stage)
    entries = []
    for n in sorted(ledger.snapshot(max_stage).members):
        entries.append((ledger.entry_stage(n), n))
    entries.sort()
    candidates: List[Tuple[int, int, Code]] = []
    for s_n, n in entries:
        candidates.append((n, s_n, h_value(h_code, n)))
    probes: List[CandidateProbe] = []
    for n, s_n, cand in candidates[:probe_cap]:
        rf = eval_code(fhat, pair(cand, max_stage), fhat_budget)
        if not rf.converged:
            probes.append(CandidateProbe(
                n=n, s_n=s_n, candidate=cand, f_value=None, points=(),
                full_agreement=False, status="fhat-diverged"))
            continue
        fv = rf.value
        points = []
        agree = True
        for y, b in grid:
            in_h = eval_code(cand, y, b).converged
            in_f = eval_code(fv, y, b).converged
            points.append((y, b, in_h, in_f))
            if in_h != in_f:
                agree = False
        probes.append(CandidateProbe(
            n=n, s_n=s_n, candidate=cand, f_value=fv,
            points=tuple(points), full_agreement=agree, status="ok"))
    return ArslanovRun(
        fhat_code=fhat,
        h_code=h_code,
        stage=max_stage,
        candidates=tuple(candidates),
        probes=tuple(probes),
    )
