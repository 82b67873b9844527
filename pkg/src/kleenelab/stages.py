"""Stagewise approximations to computably enumerable sets.

Two conventions live here.  The literal one, used by the public probes:

    domain at stage s   = { n <= s : program converges on n within s steps }
    halting set at s    = { n <= s : program n converges on input n within s }

Both are monotone in s and exhaust the true sets in the limit.  The literal
forms cost O(s) per element per call, so the engines that need thousands of
stages use the incremental trackers below instead: resumable machines that
never re-run work, plus a pairing-schedule dovetailer whose total cost is
linear in the schedule bound.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Set

from .interp import Machine
from .lang import decode, unpair


@dataclass(frozen=True)
class StageSet:
    """A finite stage-s snapshot of a c.e. set.  Monotone under advancing."""

    stage: int
    members: frozenset

    def __contains__(self, n) -> bool:
        return n in self.members

    def sorted_members(self):
        return sorted(self.members)

    def to_dict(self) -> dict:
        return {"stage": self.stage, "members": sorted(self.members)}


def enumerate_domain(e: int, stage: int, oracle=None) -> StageSet:
    """W_{e,s} under the literal convention: budget = stage for every input."""
    node = decode(e)
    found = set()
    for n in range(stage + 1):
        m = Machine(node, n, oracle)
        m.advance(stage)
        if m.converged_within(stage):
            found.add(n)
    return StageSet(stage=stage, members=frozenset(found))


def halting_approx(stage: int) -> StageSet:
    """The stage-s halting set: diagonal convergence within `stage` steps."""
    found = set()
    for n in range(stage + 1):
        m = Machine(decode(n), n)
        m.advance(stage)
        if m.converged_within(stage):
            found.add(n)
    return StageSet(stage=stage, members=frozenset(found))


class HaltingLedger:
    """Incremental diagonal-convergence tracker, shareable across searches.

    For every watched n this remembers either the exact step count at which
    program n converges on input n, or that it provably never does.  Machines
    are resumed, never restarted, so advancing to stage S costs O(S) steps
    per still-undecided index in total, not per stage.
    """

    def __init__(self):
        self._machines: Dict[int, Machine] = {}
        self._steps: Dict[int, int] = {}
        self._never: Set[int] = set()
        self._horizon = 0

    @property
    def horizon(self) -> int:
        return self._horizon

    def advance_to(self, stage: int):
        """Decide every n <= stage up to budget `stage`."""
        for n in range(stage + 1):
            if n in self._steps or n in self._never:
                continue
            m = self._machines.get(n)
            if m is None:
                m = Machine(decode(n), n)
                self._machines[n] = m
            m.advance(stage)
            if m.status == "converged":
                self._steps[n] = m.g
                del self._machines[n]
            elif m.forever or m.capped:
                self._never.add(n)
                del self._machines[n]
        if stage > self._horizon:
            self._horizon = stage

    def min_budget(self, n: int) -> Optional[int]:
        """Least budget within which program n converges on input n, if known."""
        return self._steps.get(n)

    def entry_stage(self, n: int) -> Optional[int]:
        """Least s with n in the stage-s halting set: max(n, min budget)."""
        t = self._steps.get(n)
        if t is None:
            return None
        return max(n, t)

    def converged_at(self, n: int, stage: int) -> bool:
        """Whether n sits in the stage-`stage` halting set (requires advance)."""
        if n > stage:
            return False
        t = self._steps.get(n)
        return t is not None and t <= stage

    def snapshot(self, stage: int) -> StageSet:
        """The stage set at `stage` <= horizon, from decided data only."""
        if stage > self._horizon:
            raise ValueError("ledger not advanced that far")
        members = frozenset(
            n for n, t in self._steps.items() if n <= stage and t <= stage
        )
        return StageSet(stage=stage, members=members)


class DomainDovetail:
    """Domain enumeration of one program on the pairing schedule.

    Slot z encodes (input m, budget t); processing it asks whether the
    program converges on m within t steps.  Machines resume across slots,
    so advancing the schedule bound to S costs O(S) machine steps overall.
    Every true domain element is eventually certified by some slot.
    """

    __slots__ = ("node", "oracle", "members", "found_at", "_machines", "_bound")

    def __init__(self, code: int, oracle=None):
        self.node = decode(code)
        self.oracle = oracle
        self.members: Set[int] = set()
        self.found_at: Dict[int, int] = {}
        self._machines: Dict[int, Machine] = {}
        self._bound = -1

    @property
    def bound(self) -> int:
        return self._bound

    def advance_to(self, bound: int):
        for z in range(self._bound + 1, bound + 1):
            m_in, t = unpair(z)
            if m_in in self.members:
                continue
            mach = self._machines.get(m_in)
            if mach is None:
                if t == 0:
                    continue
                mach = Machine(self.node, m_in, self.oracle)
                self._machines[m_in] = mach
            if mach.forever or mach.capped:
                continue
            mach.advance(t)
            if mach.converged_within(t):
                self.members.add(m_in)
                self.found_at[m_in] = z
                del self._machines[m_in]
        if bound > self._bound:
            self._bound = bound

    def nonempty(self) -> bool:
        return bool(self.members)


def dovetail_domain(code: int, bound: int, oracle=None) -> StageSet:
    """One-shot dovetail view of a program's domain up to a schedule bound.

    Monotone in bound with the same limit as the literal convention; the
    two differ in when an element first shows up.  Stage engines that need
    thousands of emptiness checks standardize on this view.
    """
    d = DomainDovetail(code, oracle)
    d.advance_to(bound)
    return StageSet(stage=bound, members=frozenset(d.members))
