"""Bounded, certificate-producing probes of fixed-point-free behavior.

Three escalating properties of a total function are probed here, each
phrased over the numbering evaluated by this package:

  diagonal avoidance     g(e) differs from the value of program e at e
  domain avoidance       the domain of f(n) differs from the domain of n
  avoidance with access  given n, no uniform procedure delta turns g(n)
                         into a code whose behavior matches g(n)'s

None of these is decidable, so probes return Certificates: a certificate
is `permanent` when every cited fact is frozen (a positive membership in a
monotone stage-set, or a bit-freeze guaranteed by a construction's
discipline), and `provisional` when it cites a current non-membership that
a later stage could still overturn.  check_permanence replays that
discipline on any certificate mechanically.

Binary functions are represented as unary codes applied to pair(n, x).
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .fixpoints import BOTH_EXHAUSTED, DISAGREE, classify_point
from .interp import eval_code
from .lang import Code, RIGHT, comp, decode, encode, pair
from .stages import enumerate_domain

PERMANENT = "permanent"
PROVISIONAL = "provisional"

MONOTONE_MEMBERSHIP = "monotone-membership"
FREEZE_RULE = "freeze-rule"
CURRENT_OBSERVATION = "current-observation"

# default grid for extensional equality probes: decision inputs with a
# generous shared budget
STANDARD_GRID: Tuple[Tuple[int, int], ...] = tuple((y, 10 ** 4) for y in range(16))

# extra steps eval(lift_fpf_to_fpfplus(d), pair(n, x)) takes over
# eval(d, x): composition frame, projection frame, re-entry of the body
LIFT_OVERHEAD = 3


@dataclass(frozen=True)
class EvidenceFact:
    """One membership observation backing a certificate."""

    element: int
    set_id: str
    stage: int
    member: bool
    basis: str

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "set_id": self.set_id,
            "stage": self.stage,
            "member": self.member,
            "basis": self.basis,
        }


@dataclass(frozen=True)
class Certificate:
    kind: str
    subject: str
    witness: Tuple[int, ...]
    stage_or_budget: int
    evidence: Tuple[EvidenceFact, ...]

    def __post_init__(self):
        if self.kind not in (PERMANENT, PROVISIONAL):
            raise ValueError("kind must be permanent or provisional")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject,
            "witness": list(self.witness),
            "stage_or_budget": self.stage_or_budget,
            "evidence": [f.to_dict() for f in self.evidence],
        }


def check_permanence(cert: Certificate) -> List[str]:
    """Violations of the permanence discipline; empty list means clean.

    A permanent certificate may cite a fact only if it is frozen: either a
    positive membership in a monotone set, or any polarity under a
    construction's freeze rule.  Provisional certificates are
    unconstrained (they are allowed to cite current observations).
    """
    problems: List[str] = []
    if cert.kind != PERMANENT:
        return problems
    for i, fact in enumerate(cert.evidence):
        frozen = (fact.member and fact.basis == MONOTONE_MEMBERSHIP) \
            or fact.basis == FREEZE_RULE
        if not frozen:
            problems.append(
                f"evidence {i} ({fact.set_id}, element {fact.element}): "
                f"member={fact.member} basis={fact.basis} is not a frozen fact")
    return problems


def dnc_violation(g: Code, e: int, budget: int) -> Optional[Certificate]:
    """Permanent certificate iff g(e) and program e at e agree within budget.

    Both convergences are monotone facts, so the certificate never needs
    revision; its stage_or_budget is the larger of the two exact step
    counts, making the result identical at every budget past it.
    """
    rg = eval_code(g, e, budget)
    if not rg.converged:
        return None
    rd = eval_code(e, e, budget)
    if not rd.converged:
        return None
    if rg.value != rd.value:
        return None
    v = rd.value
    settled = max(rg.steps_used, rd.steps_used)
    evidence = (
        EvidenceFact(element=e, set_id="diagonal-halting", stage=rd.steps_used,
                     member=True, basis=MONOTONE_MEMBERSHIP),
        EvidenceFact(element=pair(e, v), set_id=f"graph:{g}",
                     stage=rg.steps_used, member=True,
                     basis=MONOTONE_MEMBERSHIP),
    )
    return Certificate(
        kind=PERMANENT,
        subject=f"diagonal agreement at {e}: both sides compute {v}",
        witness=(e, v),
        stage_or_budget=settled,
        evidence=evidence,
    )


def fpf_discrepancy(f: Code, n: int, stage: int) -> Optional[Certificate]:
    """Provisional certificate citing a stage-s domain difference, or None.

    Compares the stage-bounded domains of f(n) and n.  A difference seen
    now can still be erased later (the lagging side may catch up), so
    permanence is never claimed.
    """
    rf = eval_code(f, n, stage)
    if not rf.converged:
        return None
    fn = rf.value
    wa = enumerate_domain(fn, stage)
    wb = enumerate_domain(n, stage)
    diff = wa.members.symmetric_difference(wb.members)
    if not diff:
        return None
    x = min(diff)
    in_a = x in wa.members
    evidence = (
        EvidenceFact(element=x, set_id=f"domain:{fn}", stage=stage,
                     member=in_a, basis=MONOTONE_MEMBERSHIP if in_a
                     else CURRENT_OBSERVATION),
        EvidenceFact(element=x, set_id=f"domain:{n}", stage=stage,
                     member=not in_a, basis=MONOTONE_MEMBERSHIP if not in_a
                     else CURRENT_OBSERVATION),
    )
    return Certificate(
        kind=PROVISIONAL,
        subject=(f"domains of {fn} and {n} differ at element {x} "
                 f"by stage {stage}"),
        witness=(n, fn, x),
        stage_or_budget=stage,
        evidence=evidence,
    )


@dataclass(frozen=True)
class FpfPlusWitnessQuery:
    """One bounded probe of the with-access avoidance property."""

    delta_code: Code
    g_code: Code
    n_bound: int
    budget: int

    def __post_init__(self):
        if self.n_bound < 1:
            raise ValueError("n_bound must be at least 1")


def fpf_plus_probe(q: FpfPlusWitnessQuery, grid=STANDARD_GRID) -> List[dict]:
    """Per-n outcomes of the query, one dict for each n up to n_bound.

    status is one of:
      g-diverged       g exhausted its budget at n; nothing can be said
      delta-exhausted  delta(n, g(n)) did not converge within budget
      disagreement     some grid point separates g(n) from delta's output
      fixed-point      delta converged and the grid could not separate them
    """
    rows: List[dict] = []
    for n in range(q.n_bound + 1):
        rg = eval_code(q.g_code, n, q.budget)
        if not rg.converged:
            rows.append({"n": n, "status": "g-diverged",
                         "g_value": None, "delta_value": None,
                         "separating_input": None})
            continue
        gn = rg.value
        rd = eval_code(q.delta_code, pair(n, gn), q.budget)
        if not rd.converged:
            rows.append({"n": n, "status": "delta-exhausted",
                         "g_value": gn, "delta_value": None,
                         "separating_input": None})
            continue
        dv = rd.value
        sep = None
        for y, b in grid:
            if classify_point(gn, dv, y, b) == DISAGREE:
                sep = y
                break
        rows.append({
            "n": n,
            "status": "disagreement" if sep is not None else "fixed-point",
            "g_value": gn,
            "delta_value": dv,
            "separating_input": sep,
        })
    return rows


def fpf_plus_refute(q: FpfPlusWitnessQuery) -> Optional[Certificate]:
    """Provisional certificate iff every n <= n_bound is a fixed point.

    The certificate says g uniformly produces codes that delta maps to
    extensionally equal codes across the whole range — bounded evidence
    against delta having the avoidance-with-access property.  Any
    divergence of g, exhaustion of delta, or grid disagreement yields
    None: the inconclusive or surviving cases, distinguishable via
    fpf_plus_probe.
    """
    rows = fpf_plus_probe(q)
    if any(r["status"] != "fixed-point" for r in rows):
        return None
    evidence = tuple(
        EvidenceFact(element=pair(r["n"], r["delta_value"]),
                     set_id=f"fixed-point-grid:{q.delta_code}",
                     stage=q.budget, member=True,
                     basis=CURRENT_OBSERVATION)
        for r in rows
    )
    return Certificate(
        kind=PROVISIONAL,
        subject=(f"candidate {q.g_code} computes fixed points of "
                 f"{q.delta_code} for every n up to {q.n_bound}"),
        witness=tuple(r["delta_value"] for r in rows),
        stage_or_budget=q.budget,
        evidence=evidence,
    )


def lift_fpf_to_fpfplus(delta: Code) -> Code:
    """Turn a unary avoidance candidate into a binary one ignoring n.

    The result, applied to pair(n, x), behaves as delta applied to x, at
    LIFT_OVERHEAD extra steps per evaluation.
    """
    return encode(comp(decode(delta), RIGHT))
