"""Abstract syntax of Stipula contracts.

All nodes are frozen dataclasses.  Source positions ride along in ``span``
but take no part in equality, so a reparsed pretty-print compares equal to
the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Now:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class RealLit:
    value: Decimal
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class StringLit:
    value: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Name:
    id: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Pair:
    first: "Expr"
    second: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Arith:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Rel:
    op: str  # == != < <= > >=
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolOp:
    op: str  # && ||
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Intrinsic:
    kind: str  # "uses" | "use_once"
    asset: str
    party: Optional[str] = None
    span: Optional[Span] = _span()


Expr = Union[Now, RealLit, StringLit, BoolLit, Name, Pair, Arith, Rel, BoolOp, Not, Intrinsic]


def free_names(expr: Expr) -> frozenset[str]:
    """Names occurring in ``expr`` (fields, assets, parameters, parties)."""
    if isinstance(expr, Name):
        return frozenset({expr.id})
    if isinstance(expr, Intrinsic):
        names = {expr.asset}
        if expr.party is not None:
            names.add(expr.party)
        return frozenset(names)
    if isinstance(expr, (Arith, Rel, BoolOp)):
        return free_names(expr.left) | free_names(expr.right)
    if isinstance(expr, Pair):
        return free_names(expr.first) | free_names(expr.second)
    if isinstance(expr, Not):
        return free_names(expr.operand)
    return frozenset()


def mentions_now(expr: Expr) -> bool:
    if isinstance(expr, Now):
        return True
    if isinstance(expr, (Arith, Rel, BoolOp)):
        return mentions_now(expr.left) or mentions_now(expr.right)
    if isinstance(expr, Pair):
        return mentions_now(expr.first) or mentions_now(expr.second)
    if isinstance(expr, Not):
        return mentions_now(expr.operand)
    return False


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class FieldAssign:
    """``E -> x``"""
    expr: Expr
    field: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ValueSend:
    """``E -> A``"""
    expr: Expr
    party: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AssetMove:
    """``E -o h, h'``"""
    expr: Expr
    source: str
    dest: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AssetSend:
    """``E -o h, A``"""
    expr: Expr
    source: str
    party: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    """``(B) { S }``"""
    cond: Expr
    body: tuple
    span: Optional[Span] = _span()


Stmt = Union[FieldAssign, ValueSend, AssetMove, AssetSend, If]


def stmt_names(stmt: Stmt) -> frozenset[str]:
    """Every name a statement reads or writes."""
    if isinstance(stmt, FieldAssign):
        return free_names(stmt.expr) | {stmt.field}
    if isinstance(stmt, ValueSend):
        return free_names(stmt.expr) | {stmt.party}
    if isinstance(stmt, AssetMove):
        return free_names(stmt.expr) | {stmt.source, stmt.dest}
    if isinstance(stmt, AssetSend):
        return free_names(stmt.expr) | {stmt.source, stmt.party}
    names = set(free_names(stmt.cond))
    for s in stmt.body:
        names |= stmt_names(s)
    return frozenset(names)


# -- declarations ------------------------------------------------------------

@dataclass(frozen=True)
class EventDecl:
    """``E >> @Q { S } => @Q'``"""
    guard: Expr
    state: str
    handler: tuple
    next_state: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FunctionDecl:
    state: str
    caller: str
    name: str
    params: tuple = ()
    asset_params: tuple = ()
    precondition: Optional[Expr] = None
    body: tuple = ()
    events: tuple = ()
    next_state: str = ""
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AgreementDecl:
    parties: tuple
    init_fields: tuple
    groups: tuple  # of (party tuple, field tuple)
    initial_state: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ContractDecl:
    name: str
    assets: tuple
    fields: tuple
    agreement: AgreementDecl
    functions: tuple
    span: Optional[Span] = _span()

    def states(self) -> list[str]:
        """State names in order of first use."""
        seen: dict[str, None] = {self.agreement.initial_state: None}
        for fn in self.functions:
            seen.setdefault(fn.state)
            seen.setdefault(fn.next_state)
            for ev in fn.events:
                seen.setdefault(ev.state)
                seen.setdefault(ev.next_state)
        return list(seen)

    def state_graph(self) -> dict[str, set[str]]:
        """Edges ``Q -> Q'`` contributed by functions and event handlers."""
        graph: dict[str, set[str]] = {q: set() for q in self.states()}
        for fn in self.functions:
            graph[fn.state].add(fn.next_state)
            for ev in fn.events:
                graph[ev.state].add(ev.next_state)
        return graph

    def function(self, state: str, name: str) -> Optional[FunctionDecl]:
        for fn in self.functions:
            if fn.state == state and fn.name == name:
                return fn
        return None
