"""Bijective renaming of states, assets, fields and the contract name."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from stipula.syntax import ast as A


@dataclass(frozen=True)
class Renaming:
    states: dict = field(default_factory=dict)
    assets: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    contract: str = ""

    def __post_init__(self):
        for what, m in (("states", self.states), ("assets", self.assets),
                        ("fields", self.fields)):
            if len(set(m.values())) != len(m):
                raise ValueError(f"renaming of {what} is not injective")

    def state(self, q: str) -> str:
        return self.states.get(q, q)

    def name(self, x: str) -> str:
        return self.assets.get(x, self.fields.get(x, x))


def _expr(e, r: Renaming):
    if isinstance(e, A.Name):
        return replace(e, id=r.name(e.id))
    if isinstance(e, A.Pair):
        return replace(e, first=_expr(e.first, r), second=_expr(e.second, r))
    if isinstance(e, (A.Arith, A.Rel, A.BoolOp)):
        return replace(e, left=_expr(e.left, r), right=_expr(e.right, r))
    if isinstance(e, A.Not):
        return replace(e, operand=_expr(e.operand, r))
    if isinstance(e, A.Intrinsic):
        return replace(e, asset=r.name(e.asset))
    return e


def _stmt(s, r: Renaming):
    if isinstance(s, A.If):
        return replace(s, cond=_expr(s.cond, r), body=tuple(_stmt(x, r) for x in s.body))
    if isinstance(s, A.FieldAssign):
        return replace(s, expr=_expr(s.expr, r), field=r.name(s.field))
    if isinstance(s, A.ValueSend):
        return replace(s, expr=_expr(s.expr, r))
    if isinstance(s, A.AssetMove):
        return replace(s, expr=_expr(s.expr, r), source=r.name(s.source), dest=r.name(s.dest))
    return replace(s, expr=_expr(s.expr, r), source=r.name(s.source))


def _event(ev: A.EventDecl, r: Renaming) -> A.EventDecl:
    return replace(ev, guard=_expr(ev.guard, r), state=r.state(ev.state),
                   handler=tuple(_stmt(s, r) for s in ev.handler),
                   next_state=r.state(ev.next_state))


def _function(fn: A.FunctionDecl, r: Renaming) -> A.FunctionDecl:
    # parameters shadow nothing (the checker forbids it), so renaming is total
    return replace(
        fn, state=r.state(fn.state), next_state=r.state(fn.next_state),
        precondition=None if fn.precondition is None else _expr(fn.precondition, r),
        body=tuple(_stmt(s, r) for s in fn.body),
        events=tuple(_event(ev, r) for ev in fn.events))


def rename(decl: A.ContractDecl, r: Renaming) -> A.ContractDecl:
    ag = decl.agreement
    agreement = replace(
        ag, init_fields=tuple(r.name(f) for f in ag.init_fields),
        groups=tuple((who, tuple(r.name(f) for f in what)) for who, what in ag.groups),
        initial_state=r.state(ag.initial_state))
    return replace(decl, name=r.contract or decl.name,
                   assets=tuple(r.name(h) for h in decl.assets),
                   fields=tuple(r.name(x) for x in decl.fields),
                   agreement=agreement,
                   functions=tuple(_function(fn, r) for fn in decl.functions))


def _used_names(decl: A.ContractDecl) -> set:
    names = set(decl.assets) | set(decl.fields) | set(decl.agreement.parties) | set(decl.states())
    for fn in decl.functions:
        names |= set(fn.params) | set(fn.asset_params) | {fn.name}
    return names | {decl.name}


def random_renaming(decl: A.ContractDecl, rng: random.Random) -> Renaming:
    """A random bijection per namespace, mixing permutations and fresh names."""
    taken = _used_names(decl)
    counter = iter(range(10**6))

    def fresh(prefix: str) -> str:
        while True:
            cand = f"{prefix}{next(counter)}_{rng.randrange(1000)}"
            if cand not in taken:
                taken.add(cand)
                return cand

    def biject(names, prefix: str) -> dict:
        names = list(names)
        pool = names + [fresh(prefix) for _ in names]
        rng.shuffle(pool)
        return dict(zip(names, pool[:len(names)]))

    # images stay inside their own namespace plus fresh names, so assets and
    # fields can never collide
    assets = biject(decl.assets, "h")
    fields = biject(decl.fields, "x")
    name = fresh(decl.name + "_") if rng.random() < 0.5 else decl.name
    return Renaming(biject(decl.states(), "Q"), assets, fields, name)
