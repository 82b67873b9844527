"""Finite-injury stage machine: lowness restraints versus diagonalization.

The construction builds a monotone set A of coded triples <n, x, z> with
z in {0,1}, against an injected family of adversary programs.  Requirements
alternate in priority

    L_0 > R_0 > L_1 > R_1 > ...

L_e protects a converging oracle computation {e}^{A_s}_s(e) by setting a
restraint at its use; R_e stakes a witness n and, watching the adversary's
value f(n), flips the two bits <n, f(n), 0> and <n, f(n), 1> so that the
two-bit coded program on (n, f(n)) has empty domain exactly when the bits
agree.  An R-enumeration drops all lower-priority restraints (injury); an
L-action wipes all witnesses of priority at or below its own.  At most one
requirement acts per stage, and every action is logged.

The audit re-derives every discipline rule from the log alone, so a forged
or corrupted log is caught without trusting the engine.

Two implementation notes.  Emptiness tests of the R-cases use the
pairing-schedule dovetail view of a domain (stages.dovetail_domain):
monotone, same limit as the literal per-stage convention, and maintainable
in linear total time.  And the engine finds the highest-priority
requirement by event bookkeeping (heaps of indices whose status could
grant attention) rather than rescanning all requirements each stage;
`requires_attention` is the pure recompute-from-scratch mirror of the
very same predicate, and the two agree on every reachable state.
"""

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .interp import Machine, eval_code
from .lang import decode, loop_code, nonempty_canonical_code, triple
from .notions import Certificate, EvidenceFact, PERMANENT, PROVISIONAL
from .stages import DomainDovetail, dovetail_domain

SET_RESTRAINT = "set-restraint"
PICK_WITNESS = "pick-witness"
B1_ENUMERATE = "b1-enumerate"
B2_ENUMERATE = "b2-enumerate"
INITIALIZE_WITNESSES = "initialize-witnesses"
DROP_RESTRAINTS = "drop-restraints"


@dataclass(frozen=True, order=True)
class RequirementId:
    """L_e or R_e; rank 2e for L, 2e+1 for R, lower rank = higher priority."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("L", "R"):
            raise ValueError("kind must be 'L' or 'R'")

    @property
    def rank(self) -> int:
        return 2 * self.index + (0 if self.kind == "L" else 1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "index": self.index}


@dataclass(frozen=True)
class ActionEvent:
    stage: int
    requirement: RequirementId
    action: str
    payload: Tuple[Tuple[str, int], ...]

    def get(self, key: str) -> Optional[int]:
        for k, v in self.payload:
            if k == key:
                return v
        return None

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "requirement": self.requirement.to_dict(),
            "action": self.action,
            "payload": {k: v for k, v in self.payload},
        }


@dataclass(frozen=True)
class ConstructionState:
    """Immutable snapshot after some number of stages."""

    stage: int
    A: frozenset
    restraints: Tuple[Tuple[int, int], ...]   # (e, use) pairs, e ascending
    witnesses: Tuple[Tuple[int, int], ...]    # (e, n) pairs, e ascending
    used_witnesses: frozenset
    log: Tuple[ActionEvent, ...]

    def restraint_of(self, e: int) -> int:
        for k, v in self.restraints:
            if k == e:
                return v
        return 0

    def has_restraint(self, e: int) -> bool:
        return any(k == e for k, _ in self.restraints)

    def witness_of(self, e: int) -> Optional[int]:
        for k, v in self.witnesses:
            if k == e:
                return v
        return None

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "A": sorted(self.A),
            "restraints": [list(p) for p in self.restraints],
            "witnesses": [list(p) for p in self.witnesses],
            "used_witnesses": sorted(self.used_witnesses),
            "log": [ev.to_dict() for ev in self.log],
        }


EMPTY_STATE = ConstructionState(
    stage=0, A=frozenset(), restraints=(), witnesses=(),
    used_witnesses=frozenset(), log=(),
)


def requires_attention(state: ConstructionState, req: RequirementId,
                       candidates: Dict[int, int]) -> bool:
    """The stage-s attention predicate, recomputed from scratch.

    L_e: e < s, the oracle computation {e}^{A_s}_s(e) converges (budget s,
    oracle = current A), and no restraint is in force for e.
    R_e: e < s and either the witness is undefined (case a), or the witness
    n is defined, the adversary converges on n within s steps with value v,
    and the bits of <n,v,.> together with the dovetail emptiness of the
    value's domain match subcase b.1 or b.2.

    Costs O(s) evaluation work per call.
    """
    e = req.index
    s = state.stage
    if e >= s:
        return False
    if req.kind == "L":
        if state.has_restraint(e):
            return False
        out = eval_code(e, e, s, oracle=state.A)
        return out.converged
    n = state.witness_of(e)
    if n is None:
        return True
    code = candidates.get(e)
    if code is None:
        return False
    rf = eval_code(code, n, s)
    if not rf.converged:
        return False
    v = rf.value
    b0 = triple(n, v, 0) in state.A
    b1 = triple(n, v, 1) in state.A
    if b1:
        return False
    nonempty = bool(dovetail_domain(v, s).members)
    if not nonempty and not b0:
        return True
    return nonempty and b0


class _LWatcher:
    """Lazily advanced oracle machine for one L-requirement's computation.

    Budgets are pushed well past the current stage on each look, so a
    non-converging machine is rechecked only O(log stages) times.
    """

    __slots__ = ("e", "mach", "state", "steps", "use", "next_check")

    def __init__(self, e: int, oracle_view, stage: int):
        self.e = e
        self.mach = Machine(decode(e), e, oracle_view)
        self.state = "running"   # running | converged | never
        self.steps = 0
        self.use = 0
        self.next_check = 0
        self._advance(stage)

    def _advance(self, stage: int):
        target = max(2 * stage, stage + 32)
        self.mach.advance(target)
        if self.mach.status == "converged":
            self.state = "converged"
            self.steps = self.mach.g
            self.use = self.mach.use
        elif self.mach.forever or self.mach.capped:
            self.state = "never"
        else:
            self.next_check = target + 1

    def recheck(self, stage: int):
        if self.state == "running" and stage >= self.next_check:
            self._advance(stage)

    def rebuild(self, oracle_view, stage: int):
        self.mach = Machine(decode(self.e), self.e, oracle_view)
        self.state = "running"
        self.steps = 0
        self.use = 0
        self.next_check = 0
        self._advance(stage)

    def converged_within(self, stage: int) -> bool:
        return self.state == "converged" and self.steps <= stage

    def queried(self):
        return self.mach.queried


class _SetView:
    """Live membership view of the constructed set, handed to machines."""

    __slots__ = ("s",)

    def __init__(self, s: set):
        self.s = s

    def __contains__(self, x) -> bool:
        return x in self.s


class InjuryEngine:
    """Incremental stage machine; equivalent to the pure attention predicate."""

    def __init__(self, candidates: Dict[int, int],
                 start: ConstructionState = EMPTY_STATE):
        self.candidates = dict(candidates)
        self._mapped = sorted(self.candidates)
        self.stage = start.stage
        self.A: Set[int] = set(start.A)
        self.view = _SetView(self.A)
        self.restraints: Dict[int, int] = dict(start.restraints)
        self.witnesses: Dict[int, int] = dict(start.witnesses)
        self.used: Set[int] = set(start.used_witnesses)
        self.log: List[ActionEvent] = list(start.log)
        # adversary value machines (no oracle) per candidate with a witness
        self.rmach: Dict[int, Machine] = {}
        for e in self._mapped:
            n = self.witnesses.get(e)
            if n is not None:
                m = Machine(decode(self.candidates[e]), n)
                m.advance(self.stage)
                self.rmach[e] = m
        self.dovetails: Dict[int, DomainDovetail] = {}
        # attention bookkeeping
        self.lwatch: Dict[int, _LWatcher] = {}
        self._due: List[Tuple[int, int]] = []      # (next_check, e), running
        self._pending_l: List[Tuple[int, int]] = []  # (eligible_stage, e)
        self._att_l: List[int] = []                # heap of e, lazy validity
        self._att_ra: List[int] = []               # heap of e, lazy validity
        for e in range(self.stage):
            self._watch(e)
            if e not in self.witnesses:
                heapq.heappush(self._att_ra, e)

    # -- internal helpers -------------------------------------------------

    def _watch(self, e: int):
        w = _LWatcher(e, self.view, self.stage)
        self.lwatch[e] = w
        self._schedule_l(w)

    def _schedule_l(self, w: _LWatcher):
        if w.state == "converged":
            eligible = max(w.e + 1, w.steps)
            if self.stage >= eligible:
                heapq.heappush(self._att_l, w.e)
            else:
                heapq.heappush(self._pending_l, (eligible, w.e))
        elif w.state == "running":
            heapq.heappush(self._due, (w.next_check, w.e))

    def _dovetail(self, value_code: int) -> DomainDovetail:
        d = self.dovetails.get(value_code)
        if d is None:
            d = DomainDovetail(value_code)
            self.dovetails[value_code] = d
        d.advance_to(self.stage)
        return d

    def _emit(self, req: RequirementId, action: str, **payload):
        items = tuple(sorted(payload.items()))
        self.log.append(ActionEvent(stage=self.stage, requirement=req,
                                    action=action, payload=items))

    def _invalidate_on(self, position: int):
        """A changed at `position`: rebuild machines whose runs queried it."""
        for w in self.lwatch.values():
            if w.state != "never" and position in w.queried():
                w.rebuild(self.view, self.stage)
                self._schedule_l(w)

    def _l_valid(self, e: int) -> bool:
        w = self.lwatch.get(e)
        return (w is not None and e not in self.restraints
                and w.converged_within(self.stage))

    def _r_case_b(self, e: int):
        """None, or ('b1', n, v) / ('b2', n, v) at the current stage."""
        if e >= self.stage:
            return None
        n = self.witnesses.get(e)
        if n is None:
            return None
        m = self.rmach.get(e)
        if m is None or not m.converged_within(self.stage):
            return None
        v = m.value
        if triple(n, v, 1) in self.A:
            return None
        b0 = triple(n, v, 0) in self.A
        nonempty = bool(self._dovetail(v).members)
        if not nonempty and not b0:
            return ("b1", n, v)
        if nonempty and b0:
            return ("b2", n, v)
        return None

    def _pick_witness_value(self, e: int) -> int:
        bound = 0
        for i, r in self.restraints.items():
            if i <= e and r > bound:
                bound = r
        n = bound + 1
        while n in self.used:
            n += 1
        return n

    # -- actions ----------------------------------------------------------

    def _act_l(self, e: int):
        req = RequirementId("L", e)
        w = self.lwatch[e]
        self.restraints[e] = w.use
        self._emit(req, SET_RESTRAINT, index=e, restraint=w.use)
        wiped = sorted(i for i in self.witnesses if i >= e)
        for i in wiped:
            del self.witnesses[i]
            self.rmach.pop(i, None)
            heapq.heappush(self._att_ra, i)
        self._emit(req, INITIALIZE_WITNESSES, index=e, count=len(wiped))

    def _act_r_pick(self, e: int):
        req = RequirementId("R", e)
        n = self._pick_witness_value(e)
        self.witnesses[e] = n
        self.used.add(n)
        self._emit(req, PICK_WITNESS, index=e, witness=n)
        code = self.candidates.get(e)
        if code is not None:
            m = Machine(decode(code), n)
            m.advance(self.stage)
            self.rmach[e] = m

    def _act_r_enumerate(self, e: int, case):
        req = RequirementId("R", e)
        tag, n, v = case
        z = 0 if tag == "b1" else 1
        t = triple(n, v, z)
        self.A.add(t)
        action = B1_ENUMERATE if z == 0 else B2_ENUMERATE
        self._emit(req, action, index=e, witness=n, value=v, triple=t)
        self._invalidate_on(t)
        dropped = sorted(i for i in self.restraints if i > e)
        for i in dropped:
            del self.restraints[i]
            w = self.lwatch.get(i)
            if w is not None and w.state == "converged":
                heapq.heappush(self._att_l, i)
        self._emit(req, DROP_RESTRAINTS, index=e, count=len(dropped))

    # -- stage loop ---------------------------------------------------------

    def step_once(self):
        """Execute one stage: refresh bookkeeping, let one requirement act."""
        self.stage += 1
        s = self.stage
        # index s-1 becomes eligible this stage
        e_new = s - 1
        if e_new not in self.lwatch:
            self._watch(e_new)
            if e_new not in self.witnesses:
                heapq.heappush(self._att_ra, e_new)
        # converged watchers whose eligibility stage has arrived
        while self._pending_l and self._pending_l[0][0] <= s:
            _, e = heapq.heappop(self._pending_l)
            heapq.heappush(self._att_l, e)
        # running watchers due for another look
        while self._due and self._due[0][0] <= s:
            _, e = heapq.heappop(self._due)
            w = self.lwatch.get(e)
            if w is None or w.state != "running":
                continue
            w.recheck(s)
            self._schedule_l(w)
        # adversary machines track the stage budget
        for m in self.rmach.values():
            m.advance(s)
        # highest-priority attention: L from its heap, R case (a) from its
        # heap, R case (b) by direct check of the few injected candidates
        while self._att_l and not self._l_valid(self._att_l[0]):
            heapq.heappop(self._att_l)
        best_l = self._att_l[0] if self._att_l else None
        while self._att_ra and (self._att_ra[0] in self.witnesses
                                or self._att_ra[0] >= s):
            e = self._att_ra[0]
            if e >= s:
                break
            heapq.heappop(self._att_ra)
        best_ra = None
        if self._att_ra and self._att_ra[0] < s:
            best_ra = self._att_ra[0]
        best_rb = None
        case_rb = None
        for e in self._mapped:
            case = self._r_case_b(e)
            if case is not None:
                best_rb = e
                case_rb = case
                break
        # compare ranks: L_e is 2e, R_e is 2e+1
        choices = []
        if best_l is not None:
            choices.append((2 * best_l, "L", best_l))
        if best_ra is not None:
            choices.append((2 * best_ra + 1, "Ra", best_ra))
        if best_rb is not None:
            choices.append((2 * best_rb + 1, "Rb", best_rb))
        if not choices:
            return
        _, kind, e = min(choices)
        if kind == "L":
            heapq.heappop(self._att_l)
            self._act_l(e)
        elif kind == "Ra":
            heapq.heappop(self._att_ra)
            self._act_r_pick(e)
        else:
            self._act_r_enumerate(e, case_rb)

    def run_to(self, stages: int):
        while self.stage < stages:
            self.step_once()

    def export(self) -> ConstructionState:
        return ConstructionState(
            stage=self.stage,
            A=frozenset(self.A),
            restraints=tuple(sorted(self.restraints.items())),
            witnesses=tuple(sorted(self.witnesses.items())),
            used_witnesses=frozenset(self.used),
            log=tuple(self.log),
        )


def step(state: ConstructionState, candidates: Dict[int, int]) -> ConstructionState:
    """One stage as a pure function on snapshots.

    Rebuilds the engine from the snapshot, so repeated single-stepping is
    quadratic; long runs should use `run`.
    """
    eng = InjuryEngine(candidates, start=state)
    eng.step_once()
    return eng.export()


def run(candidates: Dict[int, int], stages: int) -> ConstructionState:
    """Iterate the construction from the empty state; deterministic."""
    if stages < 0:
        raise ValueError("stages must be nonnegative")
    eng = InjuryEngine(candidates)
    eng.run_to(stages)
    return eng.export()


def event_from_dict(d: dict) -> ActionEvent:
    req = d["requirement"]
    return ActionEvent(
        stage=int(d["stage"]),
        requirement=RequirementId(kind=req["kind"], index=int(req["index"])),
        action=d["action"],
        payload=tuple(sorted((str(k), int(v))
                             for k, v in d["payload"].items())),
    )


def state_from_dict(d: dict) -> ConstructionState:
    """Rebuild a snapshot from its to_dict form, e.g. out of a trace file."""
    return ConstructionState(
        stage=int(d["stage"]),
        A=frozenset(int(x) for x in d["A"]),
        restraints=tuple((int(e), int(u)) for e, u in d["restraints"]),
        witnesses=tuple((int(e), int(n)) for e, n in d["witnesses"]),
        used_witnesses=frozenset(int(x) for x in d["used_witnesses"]),
        log=tuple(event_from_dict(ev) for ev in d["log"]),
    )


def derive_h(state: ConstructionState, n: int, x: int) -> str:
    """'empty' iff the two bits of <n, x, .> agree in the current A."""
    b0 = triple(n, x, 0) in state.A
    b1 = triple(n, x, 1) in state.A
    return "empty" if b0 == b1 else "nonempty"


def h_realization(state: ConstructionState, n: int, x: int) -> int:
    """A concrete code with the domain derive_h promises: {} or {0}."""
    if derive_h(state, n, x) == "empty":
        return loop_code()
    return nonempty_canonical_code()


# ---------------------------------------------------------------------------
# audit: every rule re-derived from the log alone


def audit(state: ConstructionState) -> List[str]:
    """Replay the log and report every discipline violation found.

    Checks: (1) per witness at most one b1 and one b2, in that order;
    (2) each R_e enumerates at most twice after it was last initialized;
    (3) restraints change only by the owner's action or a lower-indexed
    R-enumeration's drop, and never while one is in force; (4) A grows
    monotonically without duplicates; (5) the second bit of a pair is set
    only after the first; (6) picked witnesses are fresh and above every
    restraint of priority at or above the picker; plus one-requirement-
    per-stage and final-state/log consistency.
    """
    violations: List[str] = []
    A: Set[int] = set()
    restraints: Dict[int, int] = {}
    witnesses: Dict[int, int] = {}
    used: Set[int] = set()
    enum_by_witness: Dict[int, List[str]] = {}
    enums_since_init: Dict[int, int] = {}
    last_stage = 0
    stage_actor: Dict[int, RequirementId] = {}

    for idx, ev in enumerate(state.log):
        where = (f"event {idx} (stage {ev.stage}, "
                 f"{ev.requirement.kind}_{ev.requirement.index}, {ev.action})")
        e = ev.requirement.index
        if ev.stage < last_stage:
            violations.append(f"{where}: stages not monotone in the log")
        last_stage = ev.stage
        seen = stage_actor.get(ev.stage)
        if seen is None:
            stage_actor[ev.stage] = ev.requirement
        elif seen != ev.requirement:
            violations.append(f"{where}: second requirement acting at one stage")
        if e >= ev.stage:
            violations.append(f"{where}: requirement not yet eligible")

        if ev.action == SET_RESTRAINT:
            if ev.requirement.kind != "L":
                violations.append(f"{where}: restraint set by a non-L requirement")
            r = ev.get("restraint")
            if r is None:
                violations.append(f"{where}: set-restraint without a value")
                r = 0
            if e in restraints:
                violations.append(f"{where}: restraint set while one is in force")
            restraints[e] = r

        elif ev.action == INITIALIZE_WITNESSES:
            if ev.requirement.kind != "L":
                violations.append(f"{where}: initialization by a non-L requirement")
            for i in list(witnesses):
                if i >= e:
                    del witnesses[i]
            for i in list(enums_since_init):
                if i >= e:
                    enums_since_init[i] = 0

        elif ev.action == PICK_WITNESS:
            if ev.requirement.kind != "R":
                violations.append(f"{where}: witness picked by a non-R requirement")
            n = ev.get("witness")
            if n is None:
                violations.append(f"{where}: pick-witness without a witness payload")
                continue
            if n in used:
                violations.append(f"{where}: witness {n} reused")
            bound = max((r for i, r in restraints.items() if i <= e), default=0)
            if n <= bound:
                violations.append(
                    f"{where}: witness {n} not above the restraint bound {bound}")
            if e in witnesses:
                violations.append(f"{where}: witness picked while one is defined")
            witnesses[e] = n
            used.add(n)

        elif ev.action in (B1_ENUMERATE, B2_ENUMERATE):
            if ev.requirement.kind != "R":
                violations.append(f"{where}: enumeration by a non-R requirement")
            n = ev.get("witness")
            v = ev.get("value")
            t = ev.get("triple")
            z = 0 if ev.action == B1_ENUMERATE else 1
            if n is None or v is None or t != triple(n, v, z):
                violations.append(f"{where}: malformed enumeration payload")
                continue
            if witnesses.get(e) != n:
                violations.append(
                    f"{where}: enumeration on {n}, which is not the current witness")
            if t in A:
                violations.append(f"{where}: duplicate enumeration of {t}")
            if z == 1 and triple(n, v, 0) not in A:
                violations.append(
                    f"{where}: second bit of ({n},{v}) set before the first")
            seq = enum_by_witness.setdefault(n, [])
            if z == 0 and "b1" in seq:
                violations.append(f"{where}: repeated b1 on witness {n}")
            if z == 1 and "b2" in seq:
                violations.append(f"{where}: repeated b2 on witness {n}")
            if z == 1 and "b1" not in seq:
                violations.append(f"{where}: b2 before b1 on witness {n}")
            seq.append("b1" if z == 0 else "b2")
            A.add(t)
            count = enums_since_init.get(e, 0) + 1
            enums_since_init[e] = count
            if count > 2:
                violations.append(
                    f"{where}: R_{e} enumerated {count} times since last initialization")

        elif ev.action == DROP_RESTRAINTS:
            if ev.requirement.kind != "R":
                violations.append(f"{where}: restraint drop by a non-R requirement")
            for i in list(restraints):
                if i > e:
                    del restraints[i]

        else:
            violations.append(f"{where}: unknown action")

    if frozenset(A) != state.A:
        violations.append("final A does not match the log replay")
    if dict(state.restraints) != restraints:
        violations.append("final restraints do not match the log replay")
    if dict(state.witnesses) != witnesses:
        violations.append("final witnesses do not match the log replay")
    if not used <= set(state.used_witnesses):
        violations.append("used witnesses missing from the final state")
    return violations


# ---------------------------------------------------------------------------
# certificates


def disagreement_certificates(state: ConstructionState,
                              candidates: Dict[int, int]) -> List[Certificate]:
    """Domain-disagreement certificates per candidate, from the final state.

    For a candidate e with final witness n and converged value v, with bits
    (b0, b1) of <n, v, .> and the dovetail view W of the value's domain at
    the final stage:

      bits (1,1), W nonempty: permanent.  The coded side is empty forever
      (a pair's bits are never touched again once both are set) while the
      adversary side keeps its member by monotonicity.

      bits (0,0), W nonempty: permanent.  The b.1 clause requires an empty
      adversary domain, so once W is nonempty these bits can never change;
      the coded side stays empty, the adversary side does not.

      bits (1,0), W empty at this stage: provisional.  The coded side is
      nonempty forever, but the adversary side's emptiness is an
      observation no finite stage can freeze.

    Anything else is not a disagreement at this stage.
    """
    out: List[Certificate] = []
    for e in sorted(candidates):
        code = candidates[e]
        n = state.witness_of(e)
        if n is None:
            continue
        rf = eval_code(code, n, state.stage)
        if not rf.converged:
            continue
        v = rf.value
        b0 = triple(n, v, 0) in state.A
        b1 = triple(n, v, 1) in state.A
        w = dovetail_domain(v, state.stage)
        coded_empty = b0 == b1
        if coded_empty and w.members:
            member = min(w.members)
            evidence = (
                EvidenceFact(element=member, set_id=f"domain:{v}",
                             stage=state.stage, member=True,
                             basis="monotone-membership"),
                EvidenceFact(element=triple(n, v, 0), set_id="constructed-set",
                             stage=state.stage, member=b0, basis="freeze-rule"),
                EvidenceFact(element=triple(n, v, 1), set_id="constructed-set",
                             stage=state.stage, member=b1, basis="freeze-rule"),
            )
            out.append(Certificate(
                kind=PERMANENT,
                subject=(f"candidate {e}: coded domain at ({n},{v}) is empty "
                         f"forever, adversary domain is not"),
                witness=(e, n, v, member),
                stage_or_budget=state.stage,
                evidence=evidence,
            ))
        elif b0 and not b1 and not w.members:
            evidence = (
                EvidenceFact(element=triple(n, v, 0), set_id="constructed-set",
                             stage=state.stage, member=True,
                             basis="monotone-membership"),
                EvidenceFact(element=triple(n, v, 1), set_id="constructed-set",
                             stage=state.stage, member=False,
                             basis="current-observation"),
                EvidenceFact(element=0, set_id=f"domain:{v}",
                             stage=state.stage, member=False,
                             basis="current-observation"),
            )
            out.append(Certificate(
                kind=PROVISIONAL,
                subject=(f"candidate {e}: coded domain at ({n},{v}) is "
                         f"nonempty, adversary domain empty so far"),
                witness=(e, n, v),
                stage_or_budget=state.stage,
                evidence=evidence,
            ))
    return out
