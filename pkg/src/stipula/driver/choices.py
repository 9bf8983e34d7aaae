"""Enabled transitions as explicit choices, and a dispatcher that applies one.

The three sources of nondeterminism (which due event fires first, which
permitted call happens, and whether time passes instead) all surface here as
alternative members of the set returned by :func:`enabled`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from stipula.errors import (
    AgreeError, CallRejected, ChoiceNotEnabled, EventNotReady, TickBlocked,
)
from stipula.runtime import rules
from stipula.runtime.state import (
    AgreeL, CallL, Configuration, PendingEvent, Silent, TickL,
)


@dataclass(frozen=True)
class DoAgree:
    contract: str
    label: AgreeL


@dataclass(frozen=True)
class DoCall:
    contract: str
    label: CallL


@dataclass(frozen=True)
class DoFireEvent:
    contract: str
    event: PendingEvent


@dataclass(frozen=True)
class DoDiscardStale:
    contract: str
    event: PendingEvent


@dataclass(frozen=True)
class DoExecStep:
    contract: str


@dataclass(frozen=True)
class DoTick:
    pass


Choice = Union[DoAgree, DoCall, DoFireEvent, DoDiscardStale, DoExecStep, DoTick]


def _unique(events: Iterable[PendingEvent]) -> list[PendingEvent]:
    return list(dict.fromkeys(events))


def enabled(config: Configuration, agrees: Iterable[AgreeL] = (),
            calls: Iterable[CallL] = (), strict: bool = False) -> list[Choice]:
    """Every choice whose rule premises hold, drawing labels from the alphabets.

    Agreements and calls cannot be invented, so the caller supplies the
    candidate labels; everything else is derived from ``config`` alone.
    """
    agrees, calls = tuple(agrees), tuple(calls)
    out: list[Choice] = []
    for rc in config.contracts:
        if rc.stuck:
            continue
        if not rc.idle:
            out.append(DoExecStep(rc.name))
            continue
        if rc.phase is None:
            for lab in agrees:
                try:
                    rules.apply_agree(config, rc.name, lab)
                except AgreeError:
                    continue
                out.append(DoAgree(rc.name, lab))
            continue
        due = _unique(rules.due_events(rc, config.clock))
        for ev in due:
            if ev.state == rc.phase:
                out.append(DoFireEvent(rc.name, ev))
            elif not strict:
                out.append(DoDiscardStale(rc.name, ev))
        if due:
            continue
        for lab in calls:
            try:
                rules.apply_call(config, rc.name, lab)
            except CallRejected:
                continue
            out.append(DoCall(rc.name, lab))
    try:
        rules.tick(config)
    except TickBlocked:
        pass
    else:
        out.append(DoTick())
    return out


def step(config: Configuration, choice: Choice, strict: bool = False):
    """Apply ``choice``; returns ``(label, successor)``.

    A :class:`~stipula.errors.StuckError` from a failing statement propagates.
    """
    try:
        if isinstance(choice, DoTick):
            return TickL(), rules.tick(config)
        rc = config.contract(choice.contract)
        if isinstance(choice, DoAgree):
            return choice.label, rules.apply_agree(config, rc.name, choice.label)
        if isinstance(choice, DoCall):
            return choice.label, rules.apply_call(config, rc.name, choice.label)
        if isinstance(choice, DoFireEvent):
            return Silent("Event_Match"), rules.fire_event(config, rc.name, choice.event)
        if isinstance(choice, DoDiscardStale):
            if strict:
                raise ChoiceNotEnabled("stale events are never discarded in strict mode")
            return (Silent("Event_Discard"),
                    rules.discard_stale_event(config, rc.name, choice.event))
        if isinstance(choice, DoExecStep):
            if rc.idle or rc.stuck:
                raise ChoiceNotEnabled(f"{rc.name} has nothing to execute")
            if rc.residual.stmts:
                return rules.exec_step(config, rc.name)
            return Silent("State_Change"), rules.finish_body(config, rc.name)
    except (AgreeError, CallRejected, EventNotReady, TickBlocked, KeyError) as exc:
        raise ChoiceNotEnabled(str(exc)) from None
    raise ChoiceNotEnabled(f"unknown choice {choice!r}")


def settle_choice(config: Configuration, strict: bool = False) -> Optional[Choice]:
    """The deterministic policy: run bodies, discard stale events, fire due ones.

    Returns ``None`` once every contract is idle with nothing due that the
    policy may act on.
    """
    for rc in config.contracts:
        if rc.stuck:
            continue
        if not rc.idle:
            return DoExecStep(rc.name)
        if rc.phase is None:
            continue
        due = rules.due_events(rc, config.clock)
        if not strict:
            for ev in due:
                if ev.state != rc.phase:
                    return DoDiscardStale(rc.name, ev)
        for ev in due:
            if ev.state == rc.phase:
                return DoFireEvent(rc.name, ev)
    return None
