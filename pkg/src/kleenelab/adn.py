"""Diagonalization against uniform totalizers of a universal partial map.

The layout splits the naturals as triple(e, x, z) = pair(e, pair(x, z)):

    z = 0   defined region: psi behaves as program e on input x
    z >= 1  divergent region: psi never converges

Each candidate totalizer, offered as a program e, gets the witness
n_e = triple(e, 0, 1) from the divergent region.  The construction waits
for e to converge on its own witness; observing the value v it defines
delta at (n_e, v), killing e: a totalizer must keep delta undefined
wherever psi diverges, and delta(n_e, v) converging is frozen evidence it
failed.  A secondary point m_e = triple(e, 1, 1) records the opposite
obligation: delta must never be defined at (m_e, value of e at m_e), and
the audit checks that promise against the actual graph.

delta itself is one fixed program: on pair(n, x) it checks that n has
witness shape, recovers the candidate e it belongs to, reruns e on n, and
converges (to the canonical nonempty-domain code) exactly when the value
is x.  Its graph is the limit of the staged construction run over all
indices at once; a DiagonalState's delta_defined is the finite part
observed by some stage, always contained in that graph.  Sparsity (at
most one x per witness) and region discipline are consequences of the
shape check, and the audits re-derive both from the data rather than
trusting this paragraph.
"""

from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

from .interp import EvalOutcome, Machine, eval_code
from .lang import (Code, LEFT, LOOP, RIGHT, apply, comp, const, decode,
                   encode, eq, ifz, nonempty_canonical_code, pair, triple,
                   untriple)
from .notions import (Certificate, CURRENT_OBSERVATION, EvidenceFact,
                      FREEZE_RULE, MONOTONE_MEMBERSHIP, PERMANENT,
                      PROVISIONAL, STANDARD_GRID)

PSI_LAYOUT = "triple(e,x,0) runs program e on x; third coordinate >= 1 diverges"

WAITING = "waiting"
KILLED = "killed"

CONDITION_2 = "condition-2"
CONDITION_3 = "condition-3"
NONE_YET = "none-yet"


def witness_point(e: int) -> int:
    return triple(e, 0, 1)


def secondary_point(e: int) -> int:
    return triple(e, 1, 1)


def _psi_prog():
    z = comp(RIGHT, RIGHT)
    e = LEFT
    x = comp(LEFT, RIGHT)
    return ifz(z, apply(e, x), LOOP)


_PSI_CODE: Optional[Code] = None


def psi_code() -> Code:
    global _PSI_CODE
    if _PSI_CODE is None:
        _PSI_CODE = encode(_psi_prog())
    return _PSI_CODE


def psi(n: int, budget: int) -> EvalOutcome:
    """The universal map over the layout; partial computable by construction."""
    return eval_code(psi_code(), n, budget)


def psi_divergent(n: int) -> bool:
    """Structural membership in the divergent region (z >= 1)."""
    _, _, z = untriple(n)
    return z >= 1


def _delta_prog():
    # input pair(n, x): n must look like triple(e, 0, 1), i.e. pair(e, 2);
    # then rerun program e on n itself and demand the value x
    n_shape = comp(RIGHT, LEFT)
    e_of = comp(LEFT, LEFT)
    hit = eq(apply(e_of, LEFT), RIGHT)
    return ifz(eq(n_shape, const(2)),
               ifz(hit, const(nonempty_canonical_code()), LOOP),
               LOOP)


_DELTA_CODE: Optional[Code] = None


def delta_code() -> Code:
    global _DELTA_CODE
    if _DELTA_CODE is None:
        _DELTA_CODE = encode(_delta_prog())
    return _DELTA_CODE


def delta(n: int, x: int, budget: int) -> EvalOutcome:
    """Query the diagonal function's program at (n, x)."""
    return eval_code(delta_code(), pair(n, x), budget)


DELTA_MARKER = nonempty_canonical_code


@dataclass(frozen=True)
class CandidateRecord:
    e: int
    witness: int
    status: str  # waiting | killed
    observed: Optional[int]            # value of e at the witness, if seen
    kill_stage: Optional[int]
    secondary: int
    secondary_observed: Optional[int]  # value of e at the secondary point

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "witness": self.witness,
            "status": self.status,
            "observed": self.observed,
            "kill_stage": self.kill_stage,
            "secondary": self.secondary,
            "secondary_observed": self.secondary_observed,
        }


@dataclass(frozen=True)
class DiagonalState:
    """Snapshot of the staged construction.

    candidate_bound limits which programs are admitted as candidates;
    None admits every e <= stage, the unbounded ideal.
    """

    stage: int
    delta_defined: Tuple[Tuple[int, int, int], ...]  # (n, x, marker code)
    psi_layout: str
    per_candidate: Tuple[CandidateRecord, ...]
    candidate_bound: Optional[int] = None

    def record_of(self, e: int) -> Optional[CandidateRecord]:
        for r in self.per_candidate:
            if r.e == e:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "delta_defined": [list(t) for t in self.delta_defined],
            "psi_layout": self.psi_layout,
            "per_candidate": [r.to_dict() for r in self.per_candidate],
            "candidate_bound": self.candidate_bound,
        }


EMPTY_DIAGONAL = DiagonalState(
    stage=0, delta_defined=(), psi_layout=PSI_LAYOUT, per_candidate=(),
)


def _record_from_dict(d: dict) -> CandidateRecord:
    def opt(v):
        return None if v is None else int(v)
    return CandidateRecord(
        e=int(d["e"]), witness=int(d["witness"]), status=d["status"],
        observed=opt(d["observed"]), kill_stage=opt(d["kill_stage"]),
        secondary=int(d["secondary"]),
        secondary_observed=opt(d["secondary_observed"]),
    )


def diagonal_state_from_dict(d: dict) -> DiagonalState:
    """Rebuild a snapshot from its to_dict form, e.g. out of a trace file."""
    bound = d["candidate_bound"]
    return DiagonalState(
        stage=int(d["stage"]),
        delta_defined=tuple((int(n), int(x), int(m))
                            for n, x, m in d["delta_defined"]),
        psi_layout=d["psi_layout"],
        per_candidate=tuple(_record_from_dict(r) for r in d["per_candidate"]),
        candidate_bound=None if bound is None else int(bound),
    )


class DiagonalEngine:
    """Incremental runner; one machine per open obligation, resumable."""

    def __init__(self, start: DiagonalState = EMPTY_DIAGONAL,
                 candidate_bound: Optional[int] = None):
        if candidate_bound is None:
            candidate_bound = start.candidate_bound
        self.bound = candidate_bound
        self.stage = start.stage
        self.delta_defined: List[Tuple[int, int, int]] = list(start.delta_defined)
        self.records: Dict[int, CandidateRecord] = {
            r.e: r for r in start.per_candidate}
        self._wmach: Dict[int, Machine] = {}
        self._smach: Dict[int, Machine] = {}
        for r in start.per_candidate:
            if r.status == WAITING:
                self._wmach[r.e] = Machine(decode(r.e), r.witness)
            if r.secondary_observed is None:
                self._smach[r.e] = Machine(decode(r.e), r.secondary)
        for m in self._wmach.values():
            m.advance(self.stage)
        for m in self._smach.values():
            m.advance(self.stage)

    def step_once(self, budget: Optional[int] = None):
        self.stage += 1
        s = self.stage
        if budget is None:
            budget = s
        top = s if self.bound is None else min(s, self.bound - 1)
        for e in range(top + 1):
            if e not in self.records:
                rec = CandidateRecord(
                    e=e, witness=witness_point(e), status=WAITING,
                    observed=None, kill_stage=None,
                    secondary=secondary_point(e), secondary_observed=None)
                self.records[e] = rec
                self._wmach[e] = Machine(decode(e), rec.witness)
                self._smach[e] = Machine(decode(e), rec.secondary)
        for e in sorted(self._wmach):
            m = self._wmach[e]
            m.advance(budget)
            if m.converged_within(budget):
                rec = self.records[e]
                v = m.value
                self.records[e] = replace(rec, status=KILLED, observed=v,
                                          kill_stage=s)
                self.delta_defined.append((rec.witness, v, DELTA_MARKER()))
                del self._wmach[e]
            elif m.forever or m.capped:
                del self._wmach[e]
        for e in sorted(self._smach):
            m = self._smach[e]
            m.advance(budget)
            if m.converged_within(budget):
                self.records[e] = replace(self.records[e],
                                          secondary_observed=m.value)
                del self._smach[e]
            elif m.forever or m.capped:
                del self._smach[e]

    def run_to(self, stages: int):
        while self.stage < stages:
            self.step_once()

    def export(self) -> DiagonalState:
        return DiagonalState(
            stage=self.stage,
            delta_defined=tuple(sorted(self.delta_defined)),
            psi_layout=PSI_LAYOUT,
            per_candidate=tuple(self.records[e] for e in sorted(self.records)),
            candidate_bound=self.bound,
        )


def diagonal_step(state: DiagonalState, budget: Optional[int] = None) -> DiagonalState:
    """One stage as a pure function; rebuilds machines, so O(stage) per call."""
    eng = DiagonalEngine(start=state)
    eng.step_once(budget)
    return eng.export()


def run_diagonal(n_candidates: Optional[int], stages: int) -> DiagonalState:
    """Run the construction from scratch against programs e < n_candidates.

    n_candidates None admits every index up to the running stage.
    Deterministic; per-stage budget equals the stage number.
    """
    if stages < 0:
        raise ValueError("stages must be nonnegative")
    eng = DiagonalEngine(candidate_bound=n_candidates)
    eng.run_to(stages)
    return eng.export()


# ---------------------------------------------------------------------------
# audits: everything re-derived from the snapshot's data


def audit_diagonal(state: DiagonalState) -> List[str]:
    """Violations of the construction's promises, from the snapshot alone.

    Checks sparsity (at most one defined x per first coordinate), region
    discipline (entries only at witness points of killed candidates with
    the observed value), witness distinctness, marker fixedness, and the
    secondary obligation (no entry at an observed secondary point).
    """
    out: List[str] = []
    by_n: Dict[int, List[int]] = {}
    for n, x, marker in state.delta_defined:
        by_n.setdefault(n, []).append(x)
        if marker != DELTA_MARKER():
            out.append(f"delta entry ({n},{x}) carries a non-canonical marker")
    for n, xs in by_n.items():
        if len(xs) > 1:
            out.append(f"delta defined at {len(xs)} points over witness {n}")
    recs = {r.e: r for r in state.per_candidate}
    killed_witness = {r.witness: r for r in recs.values() if r.status == KILLED}
    for n, x, _ in state.delta_defined:
        rec = killed_witness.get(n)
        if rec is None:
            out.append(f"delta entry at {n}, not the witness of a killed candidate")
            continue
        if rec.observed != x:
            out.append(f"delta entry ({n},{x}) but candidate {rec.e} "
                       f"was observed at {rec.observed}")
        ee, xx, zz = untriple(n)
        if zz < 1:
            out.append(f"delta entry at {n} lies in the defined region")
    seen_witness: Dict[int, int] = {}
    for r in recs.values():
        if r.witness in seen_witness:
            out.append(f"witness {r.witness} shared by candidates "
                       f"{seen_witness[r.witness]} and {r.e}")
        seen_witness[r.witness] = r.e
        if r.witness != witness_point(r.e) or r.secondary != secondary_point(r.e):
            out.append(f"candidate {r.e} has off-layout witness points")
        if r.status == KILLED and r.observed is None:
            out.append(f"candidate {r.e} killed without an observed value")
    defined_points = {(n, x) for n, x, _ in state.delta_defined}
    for r in recs.values():
        if r.secondary_observed is not None:
            if (r.secondary, r.secondary_observed) in defined_points:
                out.append(f"secondary obligation broken at candidate {r.e}")
    return out


def check_kills(state: DiagonalState, budget: int) -> List[str]:
    """Kill soundness: recorded kills replay, and delta agrees.

    For every killed candidate, program e really converges on its witness
    to the recorded value within the recorded stage, and the delta program
    converges at (witness, value) within `budget`.
    """
    out: List[str] = []
    for r in state.per_candidate:
        if r.status != KILLED:
            continue
        res = eval_code(r.e, r.witness, r.kill_stage or 0)
        if not res.converged or res.value != r.observed:
            out.append(f"candidate {r.e}: recorded kill does not replay")
        q = delta(r.witness, r.observed, budget)
        if not q.converged:
            out.append(f"candidate {r.e}: delta program misses its own kill")
    return out


# ---------------------------------------------------------------------------
# the bounded totalizer verifier


@dataclass(frozen=True)
class PsiSpec:
    """A partial map plus a sound decision of its divergent region."""

    code: Code
    divergent: Callable[[int], bool]


@dataclass(frozen=True)
class DeltaSpec:
    """A binary partial map as a unary code on pair(n, x)."""

    code: Code


def constructed_psi_spec() -> PsiSpec:
    return PsiSpec(code=psi_code(), divergent=psi_divergent)


def constructed_delta_spec() -> DeltaSpec:
    return DeltaSpec(code=delta_code())


@dataclass(frozen=True)
class AdnVerdict:
    candidate: Code
    n: int
    grid: Tuple[Tuple[int, int], ...]
    violated: str  # condition-2 | condition-3 | none-yet
    evidence: Optional[Certificate]
    status: str    # ok | f-diverged | psi-unsettled

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "n": self.n,
            "grid": [list(p) for p in self.grid],
            "violated": self.violated,
            "evidence": self.evidence.to_dict() if self.evidence else None,
            "status": self.status,
        }


def adn_verify(f: Code, psi_spec: PsiSpec, delta_spec: DeltaSpec,
               n_bound: int, budget: int,
               grid=STANDARD_GRID) -> List[AdnVerdict]:
    """Probe whether f totalizes psi while avoiding delta, pointwise.

    For n in the divergent region, delta(n, f(n)) converging is a
    permanent condition-3 violation (a defined point never retracts, and
    the region is fixed by layout).  For n where psi converges within
    budget, the domains of f(n) and psi(n) are compared symmetrically on
    the grid; a separation is a provisional condition-2 violation.  An f
    that exhausts its budget at n fails totality at the probe level,
    reported in the verdict's status.
    """
    grid = tuple((int(y), int(b)) for y, b in grid)
    out: List[AdnVerdict] = []
    for n in range(n_bound + 1):
        rf = eval_code(f, n, budget)
        if not rf.converged:
            out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                                  violated=NONE_YET, evidence=None,
                                  status="f-diverged"))
            continue
        fn = rf.value
        if psi_spec.divergent(n):
            rd = eval_code(delta_spec.code, pair(n, fn), budget)
            if rd.converged:
                evidence = (
                    EvidenceFact(element=pair(n, fn),
                                 set_id=f"graph:{delta_spec.code}",
                                 stage=rd.steps_used, member=True,
                                 basis=MONOTONE_MEMBERSHIP),
                    EvidenceFact(element=n, set_id="psi-domain",
                                 stage=0, member=False, basis=FREEZE_RULE),
                )
                cert = Certificate(
                    kind=PERMANENT,
                    subject=(f"avoidance fails at {n}: the diagonal is "
                             f"defined at the value {fn}"),
                    witness=(n, fn),
                    stage_or_budget=rd.steps_used,
                    evidence=evidence,
                )
                out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                                      violated=CONDITION_3, evidence=cert,
                                      status="ok"))
            else:
                out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                                      violated=NONE_YET, evidence=None,
                                      status="ok"))
            continue
        rp = eval_code(psi_spec.code, n, budget)
        if not rp.converged:
            out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                                  violated=NONE_YET, evidence=None,
                                  status="psi-unsettled"))
            continue
        pn = rp.value
        sep = None
        for y, b in grid:
            in_f = eval_code(fn, y, b).converged
            in_p = eval_code(pn, y, b).converged
            if in_f != in_p:
                sep = (y, b, in_f)
                break
        if sep is None:
            out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                                  violated=NONE_YET, evidence=None,
                                  status="ok"))
            continue
        y, b, in_f = sep
        evidence = (
            EvidenceFact(element=y, set_id=f"domain:{fn}", stage=b,
                         member=in_f,
                         basis=MONOTONE_MEMBERSHIP if in_f
                         else CURRENT_OBSERVATION),
            EvidenceFact(element=y, set_id=f"domain:{pn}", stage=b,
                         member=not in_f,
                         basis=MONOTONE_MEMBERSHIP if not in_f
                         else CURRENT_OBSERVATION),
        )
        cert = Certificate(
            kind=PROVISIONAL,
            subject=(f"totalization fails at {n}: domains of {fn} and "
                     f"{pn} separate at input {y}"),
            witness=(n, fn, pn, y),
            stage_or_budget=b,
            evidence=evidence,
        )
        out.append(AdnVerdict(candidate=f, n=n, grid=grid,
                              violated=CONDITION_2, evidence=cert,
                              status="ok"))
    return out
