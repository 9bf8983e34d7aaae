"""The transition relation, one function per rule.

Every function takes an immutable :class:`Configuration` and returns a new
one.  Premise failures raise; a failed statement raises :class:`StuckError`
carrying the configuration with the contract frozen as stuck.
"""

from __future__ import annotations

from dataclasses import replace
from decimal import Decimal
from typing import Optional

from stipula.errors import (
    AgreeError, CallRejected, EvalError, EventNotReady, StuckError, TickBlocked,
)
from stipula.runtime.evaluate import CodeCounter, eval_expr
from stipula.runtime.state import (
    AgreeL, AssetOutL, CallL, Configuration, Memory, PendingEvent, Residual,
    RuntimeContract, Silent, ValueOutL,
)
from stipula.runtime.values import (
    EMPTY, Bool, Fungible, Party, Real, Token, TokenV, as_time, fixed, is_asset,
)
from stipula.syntax import ast as A


def _stuck(config: Configuration, rc: RuntimeContract, reason: str) -> StuckError:
    frozen = config.with_contract(replace(rc, stuck=reason))
    return StuckError(f"{rc.name}: {reason}", frozen)


def due_events(rc: RuntimeContract, clock: int) -> list[PendingEvent]:
    return [ev for ev in rc.pending if ev.trigger == clock]


def _without(pending: tuple, ev: PendingEvent) -> tuple:
    out = list(pending)
    out.remove(ev)
    return tuple(out)


# -- Agree -------------------------------------------------------------------

def apply_agree(config: Configuration, name: Optional[str], label: AgreeL) -> Configuration:
    rc = config.contract(name)
    ag = rc.decl.agreement
    if rc.phase is not None or rc.stuck:
        raise AgreeError(f"{rc.name} is already active")
    if len(label.parties) != len(ag.parties):
        raise AgreeError(f"agreement expects {len(ag.parties)} parties, "
                         f"got {len(label.parties)}")
    binding = {param: Party(pid) for param, pid in zip(ag.parties, label.parties)}
    if len(label.groups) != len(ag.groups):
        raise AgreeError("group mismatch: agreement has "
                         f"{len(ag.groups)} groups, label has {len(label.groups)}")
    values = {}
    for (who, what), (actual, vals) in zip(ag.groups, label.groups):
        expected = tuple(binding[p].id for p in who)
        if tuple(actual) != expected:
            raise AgreeError(f"group mismatch: expected parties {expected}, got {tuple(actual)}")
        if len(vals) != len(what):
            raise AgreeError(f"missing field value: group {who} agrees on {len(what)} "
                             f"fields, got {len(vals)} values")
        for f, v in zip(what, vals):
            if is_asset(v):
                raise AgreeError("no asset can be set during the agreement")
            values[f] = v
    missing = [f for f in ag.init_fields if f not in values]
    if missing:
        raise AgreeError(f"missing field value for {missing}")
    cells = {h: EMPTY for h in rc.decl.assets}
    memory = Memory({**binding, **values, **cells})
    new = replace(rc, phase=ag.initial_state, memory=memory, residual=None, pending=())
    return config.with_contract(new)


# -- Function ----------------------------------------------------------------

def apply_call(config: Configuration, name: Optional[str], label: CallL) -> Configuration:
    rc = config.contract(name)
    if rc.stuck:
        raise CallRejected("contract is stuck")
    if rc.phase is None:
        raise CallRejected("wrong state: contract not yet agreed")
    if not rc.idle:
        raise CallRejected("contract is executing")
    fn = rc.decl.function(rc.phase, label.fn)
    if fn is None:
        raise CallRejected(f"wrong state: no '{label.fn}' in @{rc.phase}")
    if due_events(rc, config.clock):
        raise CallRejected("event pending at this instant")
    caller = rc.memory.get(fn.caller)
    if caller != Party(label.party):
        raise CallRejected(f"wrong caller: '{label.fn}' is reserved to {fn.caller}")
    if len(label.args) != len(fn.params) or len(label.assets) != len(fn.asset_params):
        raise CallRejected(f"arity mismatch for '{label.fn}'")
    held = {c.id for c in rc.memory.values() if isinstance(c, Token) and c.held}
    seen: set[str] = set()
    for a in label.assets:
        if not isinstance(a, (Fungible, Token)) or (isinstance(a, Token) and not a.held):
            raise CallRejected(f"asset argument {a} is not an asset")
        if isinstance(a, Token):
            if a.id in held or a.id in seen:
                raise CallRejected(f"token {a.id} would be duplicated")
            seen.add(a.id)
    for v in label.args:
        if is_asset(v):
            raise CallRejected("assets must be passed as asset arguments")
    memory = rc.memory.update({**dict(zip(fn.params, label.args)),
                               **dict(zip(fn.asset_params, label.assets))})
    if fn.precondition is not None:
        try:
            ok = eval_expr(fn.precondition, memory, config.clock, CodeCounter(rc.codes))
        except EvalError as exc:
            raise CallRejected(f"precondition false: {exc}") from None
        if ok != Bool(True):
            raise CallRejected("precondition false")
    residual = Residual(fn.body, fn.events, fn.next_state,
                        scoped=fn.params + fn.asset_params, origin=fn.name)
    return config.with_contract(replace(rc, memory=memory, residual=residual))


# -- statements --------------------------------------------------------------

def _take(cell, v, what: str):
    """Remove ``v`` from asset ``cell`` or raise EvalError (premise ``l(h) >= v``)."""
    if isinstance(v, TokenV):
        if isinstance(cell, Token) and cell.held and cell.id == v.id:
            return Token(v.id, held=False), Token(v.id)
        raise EvalError(f"{what} does not hold token {v.id}")
    if not isinstance(v, Real):
        raise EvalError(f"cannot move non-asset value {v}")
    amount = v.value
    if amount < 0:
        raise EvalError(f"cannot move a negative amount {amount}")
    if isinstance(cell, Token):
        if cell.held:
            raise EvalError(f"{what} holds a token, not a fungible amount")
        cell = EMPTY
    if not isinstance(cell, Fungible):
        raise EvalError(f"{what} is not an asset")
    if cell.amount < amount:
        raise EvalError(f"insufficient asset: {what} holds {cell.amount}, needs {amount}")
    return Fungible(cell.amount - amount), Fungible(amount)


def _give(cell, part, what: str):
    if cell is None:
        raise EvalError(f"{what} is not an asset")
    if isinstance(part, Token):
        if not cell.empty:
            raise EvalError(f"{what} cannot receive token {part.id}: not empty")
        return part
    if isinstance(cell, Token):
        if cell.held:
            raise EvalError(f"{what} holds a token, cannot add an amount")
        cell = EMPTY
    return Fungible(fixed(cell.amount + part.amount))


def exec_step(config: Configuration, name: Optional[str] = None):
    """Execute the leading statement of the residual; returns ``(label, config)``."""
    rc = config.contract(name)
    if rc.stuck:
        raise StuckError(f"{rc.name}: {rc.stuck}", config)
    if rc.residual is None or not rc.residual.stmts:
        raise ValueError("exec_step needs a residual with a leading statement")
    res = rc.residual
    stmt, rest = res.stmts[0], res.stmts[1:]
    now = res.now if res.now is not None else config.clock
    mem = rc.memory
    codes = CodeCounter(rc.codes)
    try:
        if isinstance(stmt, A.If):
            cond = eval_expr(stmt.cond, mem, now, codes)
            if not isinstance(cond, Bool):
                raise EvalError(f"condition is not a boolean: {cond}")
            label = Silent("Cond_true" if cond.value else "Cond_false")
            rest = (tuple(stmt.body) + rest) if cond.value else rest
        elif isinstance(stmt, A.FieldAssign):
            v = eval_expr(stmt.expr, mem, now, codes)
            mem = mem.set(**{stmt.field: v})
            label = Silent("Field_Update")
        elif isinstance(stmt, A.ValueSend):
            v = eval_expr(stmt.expr, mem, now, codes)
            label = ValueOutL(v, _party(mem, stmt.party))
        elif isinstance(stmt, A.AssetMove):
            v = eval_expr(stmt.expr, mem, now, codes)
            src, part = _take(mem.get(stmt.source), v, stmt.source)
            mem = mem.set(**{stmt.source: src})
            mem = mem.set(**{stmt.dest: _give(mem.get(stmt.dest), part, stmt.dest)})
            label = Silent("Asset_Update")
        elif isinstance(stmt, A.AssetSend):
            v = eval_expr(stmt.expr, mem, now, codes)
            party = _party(mem, stmt.party)
            src, part = _take(mem.get(stmt.source), v, stmt.source)
            mem = mem.set(**{stmt.source: src})
            label = AssetOutL(part, party)
        else:
            raise EvalError(f"unknown statement {stmt!r}")
    except EvalError as exc:
        where = f" (line {stmt.span.line})" if stmt.span is not None else ""
        raise _stuck(config, rc, f"{exc}{where}") from None
    new = replace(rc, memory=mem, residual=replace(res, stmts=rest), codes=codes.value)
    return label, config.with_contract(new)


def _party(mem, name: str) -> str:
    p = mem.get(name)
    if not isinstance(p, Party):
        raise EvalError(f"'{name}' is not bound to a party")
    return p.id


def rule_of(label) -> str:
    return {
        "Silent": getattr(label, "rule", ""),
        "AgreeL": "Agree",
        "CallL": "Function",
        "ValueOutL": "Value_Send",
        "AssetOutL": "Asset_Send",
        "TickL": "Tick",
    }[type(label).__name__]


# -- State Change ------------------------------------------------------------

def finish_body(config: Configuration, name: Optional[str] = None) -> Configuration:
    rc = config.contract(name)
    res = rc.residual
    if rc.stuck:
        raise StuckError(f"{rc.name}: {rc.stuck}", config)
    if res is None or res.stmts:
        raise ValueError("finish_body needs a residual with no statements left")
    clock = config.clock
    for p in res.scoped:
        cell = rc.memory.get(p)
        if is_asset(cell) and not cell.empty:
            raise _stuck(config, rc, f"asset parameter '{p}' not drained ({cell})")
    scheduled = []
    for i, ev in enumerate(res.events):
        try:
            trigger = as_time(eval_expr(ev.guard, rc.memory, clock, CodeCounter(rc.codes)))
        except EvalError as exc:
            raise _stuck(config, rc, f"event guard: {exc}") from None
        binds_now = any(_stmt_mentions_now(s) for s in ev.handler)
        scheduled.append(PendingEvent(trigger.value, ev.state, ev.handler, ev.next_state,
                                      origin=f"{res.origin}#{i}",
                                      now=clock if binds_now else None))
    new = replace(rc, phase=res.target, residual=None,
                  memory=rc.memory.without(res.scoped),
                  pending=rc.pending + tuple(scheduled))
    return config.with_contract(new)


def _stmt_mentions_now(s) -> bool:
    if isinstance(s, A.If):
        return A.mentions_now(s.cond) or any(_stmt_mentions_now(x) for x in s.body)
    return A.mentions_now(s.expr)


# -- Event Match / discard ---------------------------------------------------

def fire_event(config: Configuration, name: Optional[str], event: PendingEvent) -> Configuration:
    rc = config.contract(name)
    if rc.stuck or not rc.idle:
        raise EventNotReady("contract is not idle")
    if event not in rc.pending:
        raise EventNotReady("event is not pending")
    if event.trigger != config.clock:
        raise EventNotReady(f"event due at {event.trigger}, clock is {config.clock}")
    if event.state != rc.phase:
        raise EventNotReady(f"event guarded by @{event.state}, contract is @{rc.phase}")
    residual = Residual(event.handler, (), event.next_state, origin=event.origin,
                        now=event.now)
    return config.with_contract(replace(rc, pending=_without(rc.pending, event),
                                        residual=residual))


def discard_stale_event(config: Configuration, name: Optional[str],
                        event: PendingEvent) -> Configuration:
    rc = config.contract(name)
    if rc.stuck or not rc.idle:
        raise EventNotReady("contract is not idle")
    if event not in rc.pending or event.trigger != config.clock or event.state == rc.phase:
        raise EventNotReady("event is not a stale event due now")
    return config.with_contract(replace(rc, pending=_without(rc.pending, event)))


# -- Tick --------------------------------------------------------------------

def tick(config: Configuration) -> Configuration:
    for rc in config.contracts:
        if rc.stuck:
            raise TickBlocked(f"{rc.name} is stuck: {rc.stuck}")
        if not rc.idle:
            raise TickBlocked(f"{rc.name} is executing")
        if due_events(rc, config.clock):
            raise TickBlocked(f"{rc.name} has an event due at {config.clock}")
    return replace(config, clock=config.clock + 1)


def asset_cells(rc: RuntimeContract):
    return {k: v for k, v in rc.memory.items() if is_asset(v)}


def fungible_total(rc: RuntimeContract) -> Decimal:
    return sum((v.amount for v in rc.memory.values() if isinstance(v, Fungible)),
               Decimal(0))
