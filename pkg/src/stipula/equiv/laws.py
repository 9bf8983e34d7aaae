"""Commutation laws for adjacent statements of one transaction.

Each law swaps two statements of fixed shapes.  A swap is only claimed sound
when neither statement writes a name the other reads, and (implicitly) when
the two write sets are disjoint.  Laws are checked by plugging both orders
into a context contract and running the bisimulation game.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from stipula.errors import SideConditionViolated
from stipula.equiv.bisim import BisimVerdict, bisimilar
from stipula.equiv.universe import Universe
from stipula.runtime.state import AgreeL, CallL
from stipula.runtime.values import Fungible, Real
from stipula.syntax import ast as A
from stipula.syntax.parser import parse_stmts
from stipula.syntax.printer import stmt_lines

# kinds of the first and second statement of each law
LAWS = {
    1: ("value", "value"),
    2: ("assign", "value"),
    3: ("assign", "assign"),
    4: ("asset_send", "value"),
    5: ("asset_send", "assign"),
    6: ("asset_move", "value"),
    7: ("asset_move", "assign"),
    8: ("asset_send", "asset_send"),
    9: ("asset_send", "asset_move"),
    10: ("asset_move", "asset_move"),
}

PARTIES = ("A", "B")
FIELDS = ("x0", "x1", "x2")
ASSETS = ("h0", "h1", "h2", "h3")
POSITIONS = ("top", "cond", "event")


def kind(s: A.Stmt) -> str:
    if isinstance(s, A.ValueSend):
        return "value"
    if isinstance(s, A.FieldAssign):
        return "assign"
    if isinstance(s, A.AssetSend):
        return "asset_send"
    if isinstance(s, A.AssetMove):
        return "asset_move"
    return "if"


def writes(s: A.Stmt) -> frozenset:
    if isinstance(s, A.FieldAssign):
        return frozenset({s.field})
    if isinstance(s, A.AssetSend):
        return frozenset({s.source})
    if isinstance(s, A.AssetMove):
        return frozenset({s.source, s.dest})
    return frozenset()


def _has_intrinsic(e) -> bool:
    if isinstance(e, A.Intrinsic):
        return True
    if isinstance(e, (A.Arith, A.Rel, A.BoolOp)):
        return _has_intrinsic(e.left) or _has_intrinsic(e.right)
    if isinstance(e, A.Pair):
        return _has_intrinsic(e.first) or _has_intrinsic(e.second)
    if isinstance(e, A.Not):
        return _has_intrinsic(e.operand)
    return False


@dataclass(frozen=True)
class LawInstance:
    law: int
    first: A.Stmt
    second: A.Stmt

    def orders(self) -> tuple:
        return (self.first, self.second), (self.second, self.first)

    def __str__(self) -> str:
        a, = stmt_lines(self.first, "")
        b, = stmt_lines(self.second, "")
        return f"law {self.law}: {a}; {b}"


def side_conditions(inst: LawInstance) -> list[str]:
    """Reasons the swap is not covered by the law; empty when it is."""
    if inst.law not in LAWS:
        raise ValueError(f"no law {inst.law}")
    want = LAWS[inst.law]
    got = (kind(inst.first), kind(inst.second))
    if got != want:
        raise ValueError(f"law {inst.law} relates {want[0]} and {want[1]} statements, got {got}")
    problems = []
    w1, w2 = writes(inst.first), writes(inst.second)
    fv1, fv2 = A.free_names(inst.first.expr), A.free_names(inst.second.expr)
    for x in sorted(w1 & fv2):
        problems.append(f"{x} is written by the first statement and read by the second")
    for x in sorted(w2 & fv1):
        problems.append(f"{x} is written by the second statement and read by the first")
    for x in sorted(w1 & w2):
        problems.append(f"{x} is written by both statements")
    if _has_intrinsic(inst.first.expr) and _has_intrinsic(inst.second.expr):
        problems.append("both statements draw usage codes")
    return problems


def require_side_conditions(inst: LawInstance) -> None:
    problems = side_conditions(inst)
    if problems:
        raise SideConditionViolated(f"law {inst.law}: " + "; ".join(problems))


# -- contexts ----------------------------------------------------------------

@dataclass(frozen=True)
class LawContext:
    """A one-function contract with a hole.

    The function ``run`` receives one asset, spreads it over ``h0..h3``, runs
    ``prefix``, then the hole, then drains every field and asset to ``B`` so
    the final state becomes observable.  The hole sits in the body, inside a
    conditional, or inside an event handler fired ``delay`` ticks later.
    """
    prefix: tuple = ()
    position: str = "top"
    guard: A.Expr = field(default_factory=lambda: A.BoolLit(True))
    delay: int = 0

    def fill(self, stmts) -> A.ContractDecl:
        stmts = tuple(stmts)
        funding = (
            A.AssetMove(_div(A.Name("k"), 4), "k", "h1"),
            A.AssetMove(_div(A.Name("k"), 3), "k", "h2"),
            A.AssetMove(_div(A.Name("k"), 2), "k", "h3"),
            A.AssetMove(A.Name("k"), "k", "h0"),
        )
        drain = tuple(A.ValueSend(A.Name(x), "B") for x in FIELDS) + tuple(
            A.AssetSend(A.Name(h), h, "B") for h in ASSETS)
        events = ()
        if self.position == "top":
            body = funding + self.prefix + stmts + drain
        elif self.position == "cond":
            body = funding + self.prefix + (A.If(self.guard, stmts),) + drain
        elif self.position == "event":
            body = funding + self.prefix
            trigger = A.Arith("+", A.Now(), A.RealLit(Decimal(self.delay)))
            events = (A.EventDecl(trigger, "Q1", stmts + drain, "Q2"),)
        else:
            raise ValueError(f"unknown hole position {self.position!r}")
        run = A.FunctionDecl("Q0", "A", "run", (), ("k",), None, body, events, "Q1")
        agreement = A.AgreementDecl(PARTIES, FIELDS, ((PARTIES, FIELDS),), "Q0")
        return A.ContractDecl("Law", ASSETS, FIELDS, agreement, (run,))


def _div(e, n) -> A.Arith:
    return A.Arith("/", e, A.RealLit(Decimal(n)))


def law_universe(horizon: int = 3) -> Universe:
    """One agreement and one funding call; enough to reach every hole position."""
    agree = AgreeL(PARTIES, ((PARTIES, tuple(Real(Decimal(v)) for v in (1, 2, 3))),))
    call = CallL("A", "run", (), (Fungible(Decimal(12)),))
    return Universe(horizon, (agree,), (call,))


# -- random generation -------------------------------------------------------

_LITERALS = ("0", "0.5", "1", "2", "3")


def random_expr(rng: random.Random, names, depth: int = 2) -> A.Expr:
    """A numeric expression over ``names`` (fields and assets) and literals."""
    names = sorted(names)
    roll = rng.random()
    if depth == 0 or roll < 0.45:
        if names and rng.random() < 0.6:
            return A.Name(rng.choice(names))
        if rng.random() < 0.1:
            return A.Now()
        return A.RealLit(Decimal(rng.choice(_LITERALS)))
    op = rng.choice("+-*")
    return A.Arith(op, random_expr(rng, names, depth - 1), random_expr(rng, names, depth - 1))


def random_amount(rng: random.Random, source: str, names) -> A.Expr:
    """An amount that usually fits in ``source``."""
    names = sorted(names)
    roll = rng.random()
    if roll < 0.3:
        return A.RealLit(Decimal(rng.choice(("0.5", "1"))))
    if roll < 0.6 and source in names:
        return _div(A.Name(source), rng.choice((1, 2, 4)))
    if roll < 0.8 and source in names:
        return A.Name(source)
    pick = rng.choice(names) if names else None
    if pick is None:
        return A.RealLit(Decimal(1))
    return A.Arith("*", A.Name(pick), A.RealLit(Decimal("0.1")))


def _stmt_of(kind_: str, rng: random.Random, readable, target) -> A.Stmt:
    if kind_ == "value":
        return A.ValueSend(random_expr(rng, readable), target)
    if kind_ == "assign":
        return A.FieldAssign(random_expr(rng, readable), target)
    src = target[0]
    amount = random_amount(rng, src, readable)
    if kind_ == "asset_send":
        return A.AssetSend(amount, src, target[1])
    return A.AssetMove(amount, src, target[1])


def random_instance(law: int, rng: random.Random) -> LawInstance:
    """A random instantiation of ``law`` that meets its side conditions."""
    k1, k2 = LAWS[law]
    fields = list(FIELDS)
    assets = list(ASSETS)
    rng.shuffle(fields)
    rng.shuffle(assets)

    def targets(k):
        if k == "value":
            return rng.choice(PARTIES)
        if k == "assign":
            return fields.pop()
        if k == "asset_send":
            return (assets.pop(), rng.choice(PARTIES))
        return (assets.pop(), assets.pop())

    t1, t2 = targets(k1), targets(k2)

    def written(k, t):
        if k == "assign":
            return {t}
        if k == "asset_send":
            return {t[0]}
        if k == "asset_move":
            return set(t)
        return set()

    everything = set(FIELDS) | set(ASSETS)
    s1 = _stmt_of(k1, rng, everything - written(k2, t2), t1)
    s2 = _stmt_of(k2, rng, everything - written(k1, t1), t2)
    inst = LawInstance(law, s1, s2)
    require_side_conditions(inst)
    return inst


def random_prefix_stmt(rng: random.Random) -> A.Stmt:
    everything = set(FIELDS) | set(ASSETS)
    roll = rng.random()
    if roll < 0.4:
        return A.FieldAssign(random_expr(rng, everything, 1), rng.choice(FIELDS))
    if roll < 0.6:
        return A.ValueSend(random_expr(rng, everything, 1), rng.choice(PARTIES))
    src, dst = rng.sample(ASSETS, 2)
    return A.AssetMove(random_amount(rng, src, everything), src, dst)


def random_context(rng: random.Random) -> LawContext:
    prefix = tuple(random_prefix_stmt(rng) for _ in range(rng.randint(0, 2)))
    position = rng.choice(POSITIONS)
    guard = A.Rel(rng.choice(("<", ">=")), A.Name(rng.choice(FIELDS + ASSETS)),
                  A.RealLit(Decimal(rng.choice(("1", "2")))))
    return LawContext(prefix, position, guard, rng.randint(0, 1))


# -- checking ----------------------------------------------------------------

def compare_orders(inst: LawInstance, ctx: Optional[LawContext] = None,
                   u: Optional[Universe] = None, cap: Optional[int] = None) -> BisimVerdict:
    """Play the game between the two orders, whatever the side conditions say."""
    ctx = ctx or LawContext()
    u = u or law_universe()
    one, other = inst.orders()
    return bisimilar(ctx.fill(one), ctx.fill(other), u, cap=cap)


def check_law(law: int, inst: LawInstance, ctx: Optional[LawContext] = None,
              u: Optional[Universe] = None, cap: Optional[int] = None) -> BisimVerdict:
    """Verdict for swapping ``inst`` inside ``ctx``; the law predicts RELATED."""
    if inst.law != law:
        raise ValueError(f"instance is for law {inst.law}, not {law}")
    require_side_conditions(inst)
    return compare_orders(inst, ctx, u, cap)


def _parse_pair(law: int, text: str) -> LawInstance:
    s1, s2 = parse_stmts(text, PARTIES)
    return LawInstance(law, s1, s2)


# one instance per law with a side condition, each breaking it on purpose
VIOLATIONS = {
    2: "x0 + 1 -> x0  x0 -> A",
    3: "x0 + 1 -> x0  x0 -> x1",
    4: "2 -o h0, A  h0 -> B",
    5: "2 -o h0, A  h0 -> x1",
    6: "2 -o h0, h1  h1 -> A",
    7: "2 -o h0, h1  h1 -> x1",
    8: "2 -o h0, A  h0 -o h0, B",
    9: "2 -o h0, A  h0 -o h1, h2",
    10: "2 -o h0, h1  h1 -o h1, h2",
}


def violating_instance(law: int) -> LawInstance:
    return _parse_pair(law, VIOLATIONS[law])


__all__ = [
    "LAWS", "LawContext", "LawInstance", "VIOLATIONS", "check_law", "compare_orders",
    "law_universe", "random_context", "random_instance", "require_side_conditions",
    "side_conditions", "violating_instance",
]
