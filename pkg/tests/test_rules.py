from dataclasses import replace
from decimal import Decimal

import pytest

from stipula.errors import AgreeError, CallRejected, EventNotReady, StuckError, TickBlocked
from stipula.runtime import (
    AgreeL, AssetOutL, CallL, Configuration, Fungible, Party, Real, Residual, Silent, Str, Token, ValueOutL,
    apply_agree, apply_call, discard_stale_event, due_events, exec_step, finish_body,
    fire_event, tick,
)
from stipula.syntax import parse_source, parse_stmts

from conftest import contract


def R(x):
    return Real(Decimal(x))


MU0 = AgreeL(("Alice", "Bob"), ((("Alice", "Bob"), (R(2), R(3600))),))
OFFER = CallL("Alice", "offer", (R(123),))
ACCEPT = CallL("Bob", "accept", (), (Fungible(Decimal(2)),))


def run_body(config):
    labels = []
    while config.contracts[0].residual.stmts:
        lab, config = exec_step(config)
        labels.append(lab)
    return labels, finish_body(config)


def ticks(config, n):
    for _ in range(n):
        config = tick(config)
    return config


@pytest.fixture
def agreed(bike):
    return apply_agree(Configuration.initial(bike), None, MU0)


def test_agree_rental_terms(agreed):
    rc = agreed.contracts[0]
    assert rc.phase == "Inactive"
    assert dict(rc.memory) == {"Lender": Party("Alice"), "Borrower": Party("Bob"),
                               "cost": R(2), "rent_time": R(3600),
                               "wallet": Fungible(Decimal(0))}
    assert agreed.clock == 0 and rc.pending == () and rc.residual is None


def test_agree_twice(agreed):
    with pytest.raises(AgreeError, match="already active"):
        apply_agree(agreed, None, MU0)


@pytest.mark.parametrize("label,msg", [
    (AgreeL(("Alice",), ()), "parties"),
    (AgreeL(("Alice", "Bob"), ()), "group mismatch"),
    (AgreeL(("Alice", "Bob"), ((("Bob", "Alice"), (R(2), R(3))),)), "group mismatch"),
    (AgreeL(("Alice", "Bob"), ((("Alice", "Bob"), (R(2),)),)), "missing field value"),
])
def test_agree_errors(bike, label, msg):
    with pytest.raises(AgreeError, match=msg):
        apply_agree(Configuration.initial(bike), None, label)


def test_licence_authority_needs_no_fields():
    lic = contract("licence")
    lab = AgreeL(("L", "E", "Auth"), ((("L", "E"), (R(100), R(10), R(50))),))
    rc = apply_agree(Configuration.initial(lic), None, lab).contracts[0]
    assert rc.memory["Authority"] == Party("Auth")


def test_offer_then_accept(agreed):
    c = tick(agreed)
    c = apply_call(c, None, OFFER)
    rc = c.contracts[0]
    assert rc.memory["z"] == R(123)
    assert rc.residual.target == "Proposal" and len(rc.residual.stmts) == 1
    labels, c = run_body(c)
    assert labels == [Silent("Field_Update")]
    rc = c.contracts[0]
    assert rc.phase == "Proposal" and "z" not in rc.memory
    assert rc.memory["use_code"] == R(123)
    c = ticks(c, 2)
    c = apply_call(c, None, ACCEPT)
    assert c.contracts[0].memory["y"] == Fungible(Decimal(2))
    labels, c = run_body(c)
    assert labels == [Silent("Asset_Update"), ValueOutL(R(123), "Bob")]
    rc = c.contracts[0]
    ev, = rc.pending
    assert (ev.trigger, ev.state, ev.next_state) == (3603, "Using", "End")
    assert rc.memory["wallet"] == Fungible(Decimal(2))


@pytest.mark.parametrize("label,msg", [
    (CallL("Bob", "offer", (R(1),)), "wrong caller"),
    (CallL("Alice", "offer", ()), "arity"),
    (CallL("Alice", "accept", (), (Fungible(Decimal(2)),)), "wrong state"),
])
def test_call_rejections(agreed, label, msg):
    with pytest.raises(CallRejected, match=msg):
        apply_call(agreed, None, label)


def test_precondition(agreed):
    c = finish_body(exec_step(apply_call(agreed, None, OFFER))[1])
    with pytest.raises(CallRejected, match="precondition false"):
        apply_call(c, None, CallL("Bob", "accept", (), (Fungible(Decimal(3)),)))


def test_call_before_agreement(bike):
    with pytest.raises(CallRejected, match="not yet agreed"):
        apply_call(Configuration.initial(bike), None, OFFER)


def using(agreed, clock=3603):
    """Bike rental accepted at t=3, then fast-forwarded (no event fires before 3603)."""
    c = finish_body(exec_step(apply_call(agreed, None, OFFER))[1])
    _, c = run_body(apply_call(ticks(c, 3), None, ACCEPT))
    return replace(c, clock=clock)


def test_event_precedence(agreed):
    c = using(agreed)
    with pytest.raises(CallRejected, match="event pending"):
        apply_call(c, None, CallL("Bob", "end"))
    with pytest.raises(TickBlocked):
        tick(c)


def test_fire_event(agreed):
    c = using(agreed)
    ev, = due_events(c.contracts[0], 3603)
    c = fire_event(c, None, ev)
    labels, c = run_body(c)
    assert labels == [ValueOutL(Str("End_Reached"), "Bob"),
                      AssetOutL(Fungible(Decimal(2)), "Alice")]
    assert c.contracts[0].phase == "End" and c.contracts[0].pending == ()


def test_event_not_ready(agreed):
    c = using(agreed)
    ev, = c.contracts[0].pending
    with pytest.raises(EventNotReady):
        fire_event(replace(c, clock=3602), None, ev)


def test_stale_event_discard(agreed):
    c = using(agreed, clock=100)
    _, c = run_body(apply_call(c, None, CallL("Bob", "end")))
    c = replace(c, clock=3603)
    ev, = c.contracts[0].pending
    with pytest.raises(EventNotReady):
        fire_event(c, None, ev)
    c = discard_stale_event(c, None, ev)
    assert c.contracts[0].pending == ()
    assert tick(c).clock == 3604


def test_two_stale_events_commute():
    src = """stipula S { agreement (A)() { } => @Q
      @Q A : f { now >> @Q { "x" -> A } => @Q  now >> @R { "y" -> A } => @Q } => @P }"""
    c = apply_agree(Configuration.initial(parse_source(src)), None, AgreeL(("A",), ()))
    c = finish_body(apply_call(c, None, CallL("A", "f")))
    e1, e2 = c.contracts[0].pending
    a = discard_stale_event(discard_stale_event(c, None, e1), None, e2)
    b = discard_stale_event(discard_stale_event(c, None, e2), None, e1)
    assert a == b and a.contracts[0].pending == ()


def test_insufficient_asset_is_stuck(agreed):
    src = "5 -o wallet, Lender"
    rc = agreed.contracts[0]
    res = Residual(parse_stmts(src, ("Lender",)), (), "Inactive")
    c = agreed.with_contract(replace(rc, residual=res))
    with pytest.raises(StuckError) as exc:
        exec_step(c)
    assert exc.value.config.contracts[0].stuck
    with pytest.raises(TickBlocked):
        tick(exc.value.config)


def test_licence_fee_split():
    lic = contract("licence")
    lab = AgreeL(("L", "E", "Auth"), ((("L", "E"), (R(100), R(10), R(50))),))
    c = apply_agree(Configuration.initial(lic), None, lab)
    rc = c.contracts[0]
    rc = replace(rc, memory=rc.memory.set(balance=Fungible(Decimal(100))),
                 residual=Residual(parse_stmts("balance * 0.1 -o balance, Authority",
                                               ("Authority",)), (), "Trial"))
    lab, c = exec_step(c.with_contract(rc))
    assert lab == AssetOutL(Fungible(Decimal(10)), "Auth")
    assert c.contracts[0].memory["balance"] == Fungible(Decimal(90))


def test_token_moves_whole():
    fr = contract("free_rent")
    c = apply_agree(Configuration.initial(fr), None,
                    AgreeL(("L", "B"), ((("L", "B"), (R(10), R(50))),)))
    c = apply_call(c, None, CallL("L", "boxProposal", (R(7),), (Token("locker"),)))
    _, c = run_body(c)
    rc = c.contracts[0]
    assert rc.memory["token"] == Token("locker")
    with pytest.raises(CallRejected, match="duplicated"):
        # the same token cannot enter twice
        apply_call(c.with_contract(replace(rc, phase="Inactive")), None,
                   CallL("L", "boxProposal", (R(7),), (Token("locker"),)))


def test_eager_guard(agreed):
    c = finish_body(exec_step(apply_call(agreed, None, OFFER))[1])
    _, c = run_body(apply_call(c, None, ACCEPT))
    rc = c.contracts[0]
    changed = c.with_contract(replace(rc, memory=rc.memory.set(rent_time=R(1))))
    assert changed.contracts[0].pending[0].trigger == 3600


def test_undrained_asset_parameter_is_stuck():
    src = "stipula U { assets h  agreement (A)() { } => @Q  @Q A : f[y] { } => @Q }"
    c = apply_agree(Configuration.initial(parse_source(src)), None, AgreeL(("A",), ()))
    c = apply_call(c, None, CallL("A", "f", (), (Fungible(Decimal(1)),)))
    with pytest.raises(StuckError, match="not drained"):
        finish_body(c)


def test_tick_plus_over_two_contracts(agreed):
    c = using(agreed)
    other = replace(contract("unordered_fg"), name="Other")
    both = Configuration((Configuration.initial(other).contracts[0], c.contracts[0]), 3603)
    with pytest.raises(TickBlocked):
        tick(both)
