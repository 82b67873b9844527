"""Budgeted small-step evaluator for the object language.

One step is one transition of this machine: dispatching a node or consuming
a continuation frame each cost exactly 1.  The cost model counts
transitions, not bit operations; pairing arithmetic on large numbers is a
single step.  Steps taken inside `apply` and `try` count against the
enclosing budget (a `try` additionally stops its inner run at its own data
budget and yields 0 there, so its result never depends on the outer budget).

Contract highlights, all load-bearing for the layers above:

* deterministic: outcomes depend only on (program, input, oracle contents);
* budget-monotone: converged at budget b means converged at every larger
  budget with the same value and the same steps_used;
* divergence is not an error: running out of budget reports `exhausted`;
* oracle locality: `use` strictly bounds every queried position, and any
  snapshot agreeing below `use` reproduces the outcome bit for bit.

The machine is resumable: advancing the same Machine to a larger budget
continues the run instead of restarting it.  Stage-indexed pools elsewhere
lean on this, so keep the hot loop allocation-light.

One explicit resource bound sits outside the step model: a run whose
values outgrow VALUE_LIMIT_BITS bits is abandoned for good (`capped`), and
reports `exhausted` at every budget from then on.  Pairing doubles bit
length, so nothing stops a twenty-node program from demanding
gigabyte-sized integers within fifty steps; the cap models the evaluator's
finite memory.  It is deliberately far above anything the constructions in
this package produce, abandonment is deterministic (same program, input,
and oracle always cap at the same point), and a `try` does not rescue it:
running out of memory is an evaluator condition, not a data budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from math import isqrt

from .lang import (Code, T_APPLY, T_COMP, T_CONST, T_EQ, T_ID, T_IFZ, T_LEFT,
                   T_MU, T_PAIR, T_QUERY, T_RIGHT, T_SMN, T_SUCC, T_TRY,
                   _BIG, decode, pair, smn, unpair)

CONVERGED = "converged"
EXHAUSTED = "exhausted"

# values above this many bits abandon the run; see the module docstring
VALUE_LIMIT_BITS = 1 << 20

# frame opcodes
_EV = 0
_K_PAIR = 1
_K_COMP = 2
_K_IFZ = 3
_K_EQ = 4
_K_MU = 5
_K_QUERY = 6
_K_AP1 = 7
_K_AP2 = 8
_K_SMN = 9
_K_TRY1 = 10
_K_TRY2 = 11
_K_TRY3 = 12
_K_TRY_DONE = 13
_K_DIVERGE = 14


@dataclass(frozen=True)
class OracleSnapshot:
    """Finite characteristic function of a set at a fixed stage.

    Immutable within one evaluation.  Every position outside `members`
    answers 0, so queries at or beyond the snapshot bound see the empty
    tail of a c.e. approximation.
    """

    members: frozenset
    stage: int = 0

    @property
    def bound(self) -> int:
        return max(self.members) + 1 if self.members else 0

    def bit(self, position: int) -> int:
        return 1 if position in self.members else 0


@dataclass(frozen=True)
class EvalOutcome:
    """Result of one budgeted evaluation.

    steps_used equals the transitions consumed on convergence and the full
    budget on exhaustion.  use is 1 + the largest queried oracle position
    (0 when nothing was queried or no oracle was supplied).
    """

    status: str
    value: Optional[int]
    steps_used: int
    use: int

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        return {"status": self.status, "value": self.value,
                "steps_used": self.steps_used, "use": self.use}


class Machine:
    """Resumable evaluation of one (program, input, oracle) triple."""

    __slots__ = ("ctrl", "vals", "scopes", "g", "status", "value", "oracle",
                 "queried", "forever", "had_oracle", "capped")

    def __init__(self, node, arg: int, oracle=None):
        self.ctrl = [(_EV, node, arg)]
        self.vals: list = []
        # (effective absolute deadline, ctrl depth, vals depth) per open try
        self.scopes: list = []
        self.g = 0
        self.status = EXHAUSTED
        self.value: Optional[int] = None
        self.had_oracle = oracle is not None
        self.oracle = _members_of(oracle)
        self.queried: set = set()
        # set when the run provably never converges at any budget
        self.forever = False
        # set when a value outgrew VALUE_LIMIT_BITS and the run was abandoned
        self.capped = False

    def converged_within(self, budget: int) -> bool:
        return self.status == CONVERGED and self.g <= budget

    @property
    def use(self) -> int:
        if not self.had_oracle or not self.queried:
            return 0
        return 1 + max(self.queried)

    def outcome_for(self, budget: int) -> EvalOutcome:
        if self.converged_within(budget):
            return EvalOutcome(CONVERGED, self.value, self.g, self.use)
        return EvalOutcome(EXHAUSTED, None, budget, self.use)

    def advance(self, budget: int) -> str:
        """Run until convergence or until `budget` total steps are spent."""
        if self.status == CONVERGED or self.forever or self.capped:
            return self.status
        ctrl = self.ctrl
        vals = self.vals
        scopes = self.scopes
        oracle = self.oracle
        queried = self.queried
        g = self.g
        while True:
            if not ctrl:
                self.status = CONVERGED
                self.value = vals[-1]
                self.g = g
                return CONVERGED
            if scopes:
                lim = scopes[-1][0]
                if lim > budget:
                    lim = budget
            else:
                lim = budget
            if g >= lim:
                if g >= budget:
                    self.g = g
                    return EXHAUSTED
                # a try scope ran out: unwind the shallowest due scope
                i = 0
                while scopes[i][0] > g:
                    i += 1
                _, cd, vd = scopes[i]
                del ctrl[cd:]
                del vals[vd:]
                del scopes[i:]
                vals.append(0)
                continue
            recheck = False
            while g < lim and ctrl:
                fr = ctrl.pop()
                g += 1
                op = fr[0]
                if op == _EV:
                    node = fr[1]
                    x = fr[2]
                    t = node[0]
                    if t == T_CONST:
                        vals.append(node[1])
                    elif t == T_ID:
                        vals.append(x)
                    elif t == T_COMP:
                        ctrl.append((_K_COMP, node[1]))
                        ctrl.append((_EV, node[2], x))
                    elif t == T_APPLY:
                        ctrl.append((_K_AP1, node[2], x))
                        ctrl.append((_EV, node[1], x))
                    elif t == T_LEFT:
                        if x < _BIG:
                            w = (isqrt(8 * x + 1) - 1) // 2
                            vals.append(w - (x - w * (w + 1) // 2))
                        else:
                            vals.append(unpair(x)[0])
                    elif t == T_RIGHT:
                        if x < _BIG:
                            w = (isqrt(8 * x + 1) - 1) // 2
                            vals.append(x - w * (w + 1) // 2)
                        else:
                            vals.append(unpair(x)[1])
                    elif t == T_SUCC:
                        vals.append(x + 1)
                    elif t == T_PAIR:
                        ctrl.append((_K_PAIR,))
                        ctrl.append((_EV, node[2], x))
                        ctrl.append((_EV, node[1], x))
                    elif t == T_IFZ:
                        ctrl.append((_K_IFZ, node[2], node[3], x))
                        ctrl.append((_EV, node[1], x))
                    elif t == T_EQ:
                        ctrl.append((_K_EQ,))
                        ctrl.append((_EV, node[2], x))
                        ctrl.append((_EV, node[1], x))
                    elif t == T_MU:
                        body = node[1]
                        bt = body[0]
                        # provable-divergence shortcuts; identical outcomes,
                        # the skipped iterations are all charged at once
                        if ((bt == T_CONST and body[1] != 0) or bt == T_SUCC
                                or (bt == T_ID and x != 0)):
                            ctrl.append((_K_DIVERGE,))
                            if not scopes:
                                self.forever = True
                            g = lim
                            recheck = True
                            break
                        ctrl.append((_K_MU, body, x, 0))
                        ctrl.append((_EV, body, pair(0, x)))
                    elif t == T_QUERY:
                        ctrl.append((_K_QUERY,))
                        ctrl.append((_EV, node[1], x))
                    elif t == T_SMN:
                        ctrl.append((_K_SMN,))
                        ctrl.append((_EV, node[2], x))
                        ctrl.append((_EV, node[1], x))
                    else:  # T_TRY
                        ctrl.append((_K_TRY1, node[2], node[3], x))
                        ctrl.append((_EV, node[1], x))
                elif op == _K_MU:
                    v = vals.pop()
                    if v == 0:
                        vals.append(fr[3])
                    else:
                        y = fr[3] + 1
                        ctrl.append((_K_MU, fr[1], fr[2], y))
                        ctrl.append((_EV, fr[1], pair(y, fr[2])))
                elif op == _K_COMP:
                    ctrl.append((_EV, fr[1], vals.pop()))
                elif op == _K_PAIR:
                    b = vals.pop()
                    a = vals.pop()
                    s = a + b
                    if s < _BIG:
                        vals.append(s * (s + 1) // 2 + b)
                    else:
                        v = pair(a, b)
                        if v.bit_length() > VALUE_LIMIT_BITS:
                            self.g = g
                            self.capped = True
                            del ctrl[:], vals[:], scopes[:]
                            return EXHAUSTED
                        vals.append(v)
                elif op == _K_IFZ:
                    ctrl.append((_EV, fr[1] if vals.pop() == 0 else fr[2],
                                 fr[3]))
                elif op == _K_EQ:
                    b = vals.pop()
                    vals.append(0 if vals.pop() == b else 1)
                elif op == _K_AP1:
                    ctrl.append((_K_AP2, vals.pop()))
                    ctrl.append((_EV, fr[1], fr[2]))
                elif op == _K_AP2:
                    a = vals.pop()
                    ctrl.append((_EV, decode(fr[1]), a))
                elif op == _K_QUERY:
                    p = vals.pop()
                    if oracle is None:
                        vals.append(0)
                    else:
                        queried.add(p)
                        vals.append(1 if p in oracle else 0)
                elif op == _K_SMN:
                    xv = vals.pop()
                    v = smn(vals.pop(), xv)
                    if v.bit_length() > VALUE_LIMIT_BITS:
                        self.g = g
                        self.capped = True
                        del ctrl[:], vals[:], scopes[:]
                        return EXHAUSTED
                    vals.append(v)
                elif op == _K_TRY1:
                    # fr: (op, argnode, budnode, x); code value just landed
                    ctrl.append((_K_TRY2, fr[2], fr[3], vals.pop()))
                    ctrl.append((_EV, fr[1], fr[3]))
                elif op == _K_TRY2:
                    # fr: (op, budnode, x, c); arg value just landed
                    ctrl.append((_K_TRY3, fr[3], vals.pop()))
                    ctrl.append((_EV, fr[1], fr[2]))
                elif op == _K_TRY3:
                    b = vals.pop()
                    eff = g + b
                    if scopes and scopes[-1][0] < eff:
                        eff = scopes[-1][0]
                    ctrl.append((_K_TRY_DONE,))
                    scopes.append((eff, len(ctrl) - 1, len(vals)))
                    ctrl.append((_EV, decode(fr[1]), fr[2]))
                    recheck = True
                    break
                elif op == _K_TRY_DONE:
                    scopes.pop()
                    vals[-1] += 1
                    recheck = True
                    break
                else:  # _K_DIVERGE: pin the run at its limit, resumably
                    ctrl.append(fr)
                    g = lim
                    recheck = True
                    break
            self.g = g
            if recheck or not ctrl:
                continue
            # fell out with g >= lim; outer loop decides what that means


def _members_of(oracle):
    if oracle is None:
        return None
    if isinstance(oracle, OracleSnapshot):
        return oracle.members
    if isinstance(oracle, (set, frozenset)):
        return frozenset(oracle)
    # any other membership view is kept as-is; callers that hand in a live
    # view own the consistency of answers across a machine's lifetime
    return oracle


def eval_node(node, x: int, budget: int, oracle=None) -> EvalOutcome:
    m = Machine(node, x, oracle)
    m.advance(budget)
    return m.outcome_for(budget)


def eval_code(code: Code, x: int, budget: int,
              oracle: Union[OracleSnapshot, frozenset, set, None] = None
              ) -> EvalOutcome:
    """Run the program numbered `code` on input x for at most `budget` steps."""
    return eval_node(decode(code), x, budget, oracle)
