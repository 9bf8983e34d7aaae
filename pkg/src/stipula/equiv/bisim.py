"""Bounded legal bisimulation as an on-the-fly game.

Two nodes at the same clock are related when

* every agreement one can make is matched by an agreement of the other that
  is equal up to reordering parties and whole groups, with related successors;
* every way one can complete the current tick (a multiset of observable
  labels followed by the tick) is matched by a completion of the other with
  the same multiset, with related successors after the tick.

Clocks at or beyond the universe horizon are not expanded: successors that
reach it are assumed related.  Game positions are memoised; the position graph
is acyclic (agreement happens once, every block ends with a tick) so a plain
memo table computes the greatest fixpoint.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Optional

from stipula.driver.choices import DoAgree, DoCall
from stipula.driver.session import Agree, Call, RunResult, Session, Wait
from stipula.equiv.lts import Explorer, Node
from stipula.equiv.universe import Universe
from stipula.runtime.state import AgreeL, Configuration, label_key, label_str
from stipula.syntax.ast import ContractDecl


@dataclass(frozen=True)
class BisimVerdict:
    related: bool
    # the attacker's play: (clock, move) pairs in order
    witness: tuple = ()
    attacker: str = ""  # "left" or "right"
    reason: str = ""
    end: int = 0  # clock of the block the defender could not match
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.related

    def script(self) -> list:
        """The witness as a trace script (agreements and calls with their times)."""
        out = []
        for at, mv in self.witness:
            if isinstance(mv.choice, DoAgree):
                out.append(Agree(at, mv.choice.label))
            elif isinstance(mv.choice, DoCall):
                out.append(Call(at, mv.choice.label))
        out.append(Wait(self.end + 1))
        return out

    def describe(self) -> str:
        if self.related:
            return "RELATED"
        return f"NOT RELATED: {self.reason}"


def gc_events(config: Configuration) -> Configuration:
    """Drop pending events whose instant has already passed; they can never fire."""
    for rc in config.contracts:
        live = tuple(ev for ev in rc.pending if ev.trigger >= config.clock)
        if len(live) != len(rc.pending):
            config = config.with_contract(replace(rc, pending=live))
    return config


def _agree_key(label: AgreeL):
    return label_key(label)


class _Game:
    def __init__(self, u: Universe, cap: Optional[int]):
        self.u = u
        self.ex = (Explorer(u, cap), Explorer(u, cap))
        self.memo: dict = {}

    @property
    def nodes(self) -> int:
        return self.ex[0].size + self.ex[1].size

    def play(self, n1: Node, n2: Node):
        """None when related, else ``(attacker, witness, reason, end)``."""
        if n1.clock >= self.u.horizon:
            return None
        key = (n1.key(), n2.key())
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None  # coinductive assumption
        # direct mismatches first, so witnesses stay as short as possible
        res = None
        for deep in (False, True):
            res = (self._agreements(n1, n2, 0, deep) or self._agreements(n2, n1, 1, deep)
                   or self._blocks(n1, n2, 0, deep) or self._blocks(n2, n1, 1, deep))
            if res is not None:
                break
        self.memo[key] = res
        return res

    def _pair(self, side: int, a: Node, d: Node):
        return self.play(a, d) if side == 0 else self.play(d, a)

    def _agreements(self, a: Node, d: Node, side: int, deep: bool):
        ex_a, ex_d = self.ex[side], self.ex[1 - side]
        answers = [mv for mv in ex_d.moves(d) if isinstance(mv.choice, DoAgree)]
        for mv in ex_a.moves(a):
            if not isinstance(mv.choice, DoAgree) or mv.target is None:
                continue
            want = _agree_key(mv.choice.label)
            fail = None
            matched = False
            for ans in answers:
                if ans.target is None or _agree_key(ans.choice.label) != want:
                    continue
                if not deep:
                    matched = True
                    break
                sub = self._pair(side, mv.target, ans.target)
                if sub is None:
                    matched = True
                    break
                fail = fail or sub
            if matched:
                continue
            head = ((a.clock, mv),)
            if fail is None:
                return (side, head, f"{label_str(mv.choice.label)} at t={a.clock} "
                        f"is not matched", a.clock)
            return (fail[0], head + fail[1], fail[2], fail[3])
        return None

    def _blocks(self, a: Node, d: Node, side: int, deep: bool):
        ex_a, ex_d = self.ex[side], self.ex[1 - side]
        by_mset = defaultdict(list)
        for (m, _), (succ, _) in ex_d.blocks(d).items():
            by_mset[m].append(succ)
        ordered = sorted(ex_a.blocks(a).items(), key=lambda kv: (len(kv[0][0]), kv[0][0]))
        for (m, _), (succ, path) in ordered:
            head = tuple((a.clock, mv) for mv in path)
            candidates = by_mset.get(m)
            if candidates and not deep:
                continue
            if not candidates:
                shown = ", ".join(label_str(l) for mv in path for l in mv.labels) or "nothing"
                return (side, head, f"block at t={a.clock} emitting [{shown}] "
                        f"then ticking is not matched", a.clock)
            fail = None
            for cand in candidates:
                sub = self._pair(side, succ, cand)
                if sub is None:
                    break
                fail = fail or sub
            else:
                return (fail[0], head + fail[1], fail[2], fail[3])
        return None


def bisimilar_configs(c1: Configuration, c2: Configuration, u: Universe,
                      cap: Optional[int] = None) -> BisimVerdict:
    """Play the game from two configurations; both must be idle at the same clock."""
    if c1.clock != c2.clock:
        raise ValueError("configurations must share the clock")
    game = _Game(u, cap)
    res = game.play(Node(c1), Node(c2))
    if res is None:
        return BisimVerdict(True, nodes=game.nodes)
    side, witness, reason, end = res
    return BisimVerdict(False, witness, ("left", "right")[side], reason, end, game.nodes)


def bisimilar(c1: ContractDecl, c2: ContractDecl, u: Universe, clock: int = 0,
              cap: Optional[int] = None) -> BisimVerdict:
    return bisimilar_configs(Configuration.initial(c1, clock=clock),
                             Configuration.initial(c2, clock=clock), u, cap)


@dataclass(frozen=True)
class TimeShift:
    at_t: BisimVerdict
    at_later: BisimVerdict

    @property
    def holds(self) -> bool:
        """The implication: related at t gives related at the later clock."""
        return (not self.at_t.related) or self.at_later.related


def check_time_shift(c1: ContractDecl, c2: ContractDecl, u: Universe, t: int, later: int,
                     cap: Optional[int] = None) -> TimeShift:
    """Compare the game started at ``t`` with the same game started at ``later``.

    The horizon moves with the start so both games look equally far ahead.
    """
    if later < t:
        raise ValueError("the later clock must not precede t")
    first = bisimilar(c1, c2, u, clock=t, cap=cap)
    second = bisimilar(c1, c2, u.shifted(later - t), clock=later, cap=cap)
    return TimeShift(first, second)


# -- witness replay ----------------------------------------------------------

def observation_profile(result: RunResult, upto: int) -> Counter:
    """Observable labels and refusals per clock, ignoring order within a clock."""
    prof = Counter()
    for at, lab in result.observations:
        if at <= upto:
            prof[(at, label_key(lab))] += 1
    for r in result.rejected:
        if r.at <= upto:
            prof[(r.at, "rejected", repr(r.txn))] += 1
    return prof


def replay_witness(c1: ContractDecl, c2: ContractDecl, verdict: BisimVerdict,
                   clock: int = 0) -> bool:
    """Run the witness script on both contracts; True if their observations differ."""
    if verdict.related:
        return False
    script = verdict.script()
    script = [s for s in script if s.at >= clock]
    runs = []
    for decl in (c1, c2):
        session = Session(Configuration.initial(decl, clock=clock))
        for txn in script:
            session.submit(txn)
        runs.append(session.result)
    return observation_profile(runs[0], verdict.end) != observation_profile(runs[1], verdict.end)


__all__ = [
    "BisimVerdict", "TimeShift", "bisimilar", "bisimilar_configs", "check_time_shift",
    "gc_events", "observation_profile", "replay_witness",
]
