"""Well-formedness checks and the asset-drain lint."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from stipula.syntax import ast as A


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Optional[A.Span] = None

    def render(self, filename: str = "<input>") -> str:
        line, col = (self.span.line, self.span.col) if self.span else (1, 1)
        return f"{filename}:{line}:{col}: {self.severity}: {self.message}"


def _dupes(names: Iterable[str]) -> list[str]:
    seen, dup = set(), []
    for n in names:
        if n in seen and n not in dup:
            dup.append(n)
        seen.add(n)
    return dup


class _Checker:
    def __init__(self, decl: A.ContractDecl):
        self.decl = decl
        self.diags: list[Diagnostic] = []
        self.assets = set(decl.assets)
        self.fields = set(decl.fields)
        self.parties = set(decl.agreement.parties)

    def err(self, msg: str, span=None) -> None:
        self.diags.append(Diagnostic("error", msg, span))

    def warn(self, msg: str, span=None) -> None:
        self.diags.append(Diagnostic("warning", msg, span))

    def run(self) -> list[Diagnostic]:
        d = self.decl
        for kind, names in (("asset", d.assets), ("field", d.fields),
                            ("party", d.agreement.parties)):
            for n in _dupes(names):
                self.err(f"duplicate {kind} name '{n}'", d.span)
        for n in sorted((self.assets & self.fields) | (self.assets & self.parties)
                        | (self.fields & self.parties)):
            self.err(f"name '{n}' is declared in more than one namespace", d.span)
        self.agreement()
        for fn in d.functions:
            self.function(fn)
        self.states()
        return self.diags

    def agreement(self) -> None:
        ag = self.decl.agreement
        for n in _dupes(ag.init_fields):
            self.err(f"field '{n}' listed twice in agreement", ag.span)
        for n in ag.init_fields:
            if n not in self.fields:
                self.err(f"agreement initialises undeclared field '{n}'", ag.span)
        covered: list[str] = []
        for who, what in ag.groups:
            for p in who:
                if p not in self.parties:
                    self.err(f"agreement group names unknown party '{p}'", ag.span)
            covered.extend(what)
        if _dupes(covered) or set(covered) != set(ag.init_fields):
            self.err("fields not partitioned: agreement groups must split the "
                     "agreed fields into disjoint, covering subsets", ag.span)

    def function(self, fn: A.FunctionDecl) -> None:
        if fn.caller not in self.parties:
            self.err(f"caller '{fn.caller}' of '{fn.name}' is not an agreement party", fn.span)
        params = list(fn.params) + list(fn.asset_params)
        for n in _dupes(params):
            self.err(f"duplicate parameter '{n}' in '{fn.name}'", fn.span)
        for n in params:
            if n in self.assets or n in self.fields or n in self.parties:
                self.err(f"parameter '{n}' of '{fn.name}' shadows a contract name", fn.span)
        values = set(fn.params)
        assets = self.assets | set(fn.asset_params)
        readable = self.fields | self.parties | assets | values
        if fn.precondition is not None:
            self.expr(fn.precondition, readable, assets, fn.span)
        for s in fn.body:
            self.stmt(s, readable, assets)
        scoped = set(params)
        for ev in fn.events:
            names = free_names_event(ev)
            for n in sorted(names & scoped):
                self.err(f"parameter escapes into event: '{n}' used in event of "
                         f"'{fn.name}'", ev.span)
            ev_readable = self.fields | self.parties | self.assets
            self.expr(ev.guard, ev_readable | scoped, self.assets | set(fn.asset_params),
                      ev.span, report_unknown=True, skip=scoped)
            for s in ev.handler:
                self.stmt(s, ev_readable | scoped, self.assets | set(fn.asset_params),
                          skip=scoped)

    def expr(self, e: A.Expr, readable, assets, span, *, report_unknown=True,
             skip=frozenset(), pair_ok=False) -> None:
        if isinstance(e, A.Pair) and not pair_ok:
            self.err("pair expressions are only allowed as the value of a send",
                     e.span or span)
        if isinstance(e, A.Intrinsic):
            if e.asset not in assets and e.asset not in skip:
                self.err(f"{e.kind} expects an asset, got '{e.asset}'", e.span or span)
            if e.party is not None and e.party not in self.parties:
                self.err(f"{e.kind} expects a party, got '{e.party}'", e.span or span)
            return
        if isinstance(e, A.Name):
            if e.id not in readable and report_unknown:
                self.err(f"unknown name '{e.id}'", e.span or span)
            return
        for child in _children(e):
            self.expr(child, readable, assets, span, report_unknown=report_unknown,
                      skip=skip, pair_ok=isinstance(e, A.Pair) and pair_ok)

    def stmt(self, s: A.Stmt, readable, assets, skip=frozenset()) -> None:
        sp = s.span
        if isinstance(s, A.FieldAssign):
            self.expr(s.expr, readable, assets, sp, skip=skip)
            if s.field in assets:
                self.err(f"'->' cannot assign asset '{s.field}'; use '-o'", sp)
            elif s.field not in self.fields and s.field not in skip:
                self.err(f"assignment target '{s.field}' is not a field", sp)
        elif isinstance(s, A.ValueSend):
            self.expr(s.expr, readable, assets, sp, skip=skip, pair_ok=True)
        elif isinstance(s, (A.AssetMove, A.AssetSend)):
            self.expr(s.expr, readable, assets, sp, skip=skip)
            if s.source not in assets and s.source not in skip:
                self.err(f"asset operation source '{s.source}' is not an asset", sp)
            if isinstance(s, A.AssetMove) and s.dest not in assets and s.dest not in skip:
                self.err(f"asset operation destination '{s.dest}' is not an asset", sp)
        elif isinstance(s, A.If):
            self.expr(s.cond, readable, assets, sp, skip=skip)
            for inner in s.body:
                self.stmt(inner, readable, assets, skip)

    def states(self) -> None:
        d = self.decl
        seen: dict[tuple[str, str], A.FunctionDecl] = {}
        for fn in d.functions:
            key = (fn.state, fn.name)
            if key in seen:
                self.warn(f"function '{fn.name}' declared twice for state @{fn.state}", fn.span)
            seen[key] = fn
        graph = d.state_graph()
        reach = {d.agreement.initial_state}
        todo = [d.agreement.initial_state]
        while todo:
            q = todo.pop()
            for nxt in graph.get(q, ()):
                if nxt not in reach:
                    reach.add(nxt)
                    todo.append(nxt)
        for fn in d.functions:
            if fn.state not in reach:
                self.warn(f"function '{fn.name}' guarded by unreachable state @{fn.state}",
                          fn.span)


def _children(e: A.Expr) -> tuple:
    if isinstance(e, (A.Arith, A.Rel, A.BoolOp)):
        return (e.left, e.right)
    if isinstance(e, A.Pair):
        return (e.first, e.second)
    if isinstance(e, A.Not):
        return (e.operand,)
    return ()


def free_names_event(ev: A.EventDecl) -> frozenset[str]:
    names = set(A.free_names(ev.guard))
    for s in ev.handler:
        names |= A.stmt_names(s)
    return frozenset(names)


def check_wellformed(decl: A.ContractDecl) -> list[Diagnostic]:
    """All diagnostics for ``decl``; no errors means the contract is well formed."""
    return _Checker(decl).run()


def errors(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


# -- asset-drain lint --------------------------------------------------------

def _drains(s: A.Stmt, y: str) -> bool:
    return (isinstance(s, (A.AssetMove, A.AssetSend)) and s.source == y
            and s.expr == A.Name(y))


def _paths(stmts: tuple) -> list[list[A.Stmt]]:
    """Every straight-line path through ``stmts``; each conditional forks."""
    paths: list[list[A.Stmt]] = [[]]
    for s in stmts:
        if isinstance(s, A.If):
            taken = [p + q for p in paths for q in _paths(s.body)]
            paths = taken + paths
        else:
            paths = [p + [s] for p in paths]
    return paths


def lint_asset_drain(decl: A.ContractDecl) -> list[Diagnostic]:
    """Warn for asset parameters that some path through the body leaves undrained.

    Only a move of the whole parameter (``y -o ...``) counts as draining, so the
    lint may over-warn.
    """
    out = []
    for fn in decl.functions:
        paths = _paths(fn.body)
        for y in fn.asset_params:
            if not all(any(_drains(s, y) for s in p) for p in paths):
                out.append(Diagnostic(
                    "warning",
                    f"asset parameter '{y}' of '{fn.name}' may not be drained on every path",
                    fn.span))
    return out
