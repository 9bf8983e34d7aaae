from functools import lru_cache
from itertools import combinations_with_replacement

import pytest

from stipula.driver import DoAgree, DoCall, DoTick, enabled, step
from stipula.equiv import Universe, bisimilar, replay_witness
from stipula.errors import StuckError
from stipula.runtime import AgreeL, CallL, Configuration
from stipula.runtime.state import label_key, observable
from stipula.syntax import parse_source

from conftest import CONTRACTS, contract, universe


def test_fg_not_related_with_witness():
    u = universe("sequenced_fg")
    f, g = contract("sequenced_fg"), contract("unordered_fg")
    v = bisimilar(f, g, u)
    assert not v.related
    calls = [(at, mv.choice.label) for at, mv in v.witness if isinstance(mv.choice, DoCall)]
    assert calls == [(0, CallL("B", "g"))]
    assert replay_witness(f, g, v)
    assert "NOT RELATED" in v.describe()


def test_hello_against_later_greeting():
    u = universe("hello_event")
    v = bisimilar(contract("hello_event"), contract("hello_event_later"), u)
    assert not v.related
    assert replay_witness(contract("hello_event"), contract("hello_event_later"), v)


@pytest.mark.parametrize("name", CONTRACTS)
def test_reflexive(name):
    assert bisimilar(contract(name), contract(name), universe(name)).related


def test_symmetric_verdicts():
    names = ["sequenced_fg", "unordered_fg", "hello_event", "hello_event_later"]
    u = universe("sequenced_fg")
    for a in names:
        for b in names:
            assert bisimilar(contract(a), contract(b), u).related == \
                bisimilar(contract(b), contract(a), u).related


def test_witness_script_ends_after_block():
    v = bisimilar(contract("sequenced_fg"), contract("unordered_fg"), universe("sequenced_fg"))
    s = v.script()
    assert s[-1].at == v.end + 1


def test_related_verdict_has_no_witness():
    v = bisimilar(contract("bike_rental"), contract("bike_rental_renamed"),
                  universe("bike_rental"))
    assert v and v.witness == () and not replay_witness(
        contract("bike_rental"), contract("bike_rental_renamed"), v)


# -- brute-force oracle ------------------------------------------------------
# Enumerates tick-blocks straight from enabled/step, without the explorer.

def _drain(config, labels):
    """Run silent body steps to idle, branching over every enabled step."""
    busy = [c for c in enabled(config) if not isinstance(c, DoTick)]
    if all(rc.idle for rc in config.contracts):
        yield labels, config
        return
    for ch in busy:
        try:
            lab, nxt = step(config, ch)
        except StuckError:
            continue
        yield from _drain(nxt, labels + ((lab,) if observable(lab) else ()))


def _moves(config, spent, u):
    room = spent < u.block_size
    for ch in enabled(config, u.agrees if room else (), u.calls if room else ()):
        if isinstance(ch, DoTick):
            continue
        try:
            lab, nxt = step(config, ch)
        except StuckError:
            continue
        first = (lab,) if observable(lab) else ()
        for labels, idle in _drain(nxt, first):
            yield ch, labels, idle, spent + isinstance(ch, (DoAgree, DoCall))


def _blocks(config, spent, u):
    out = set()
    if any(isinstance(c, DoTick) for c in enabled(config)):
        out.add(((), step(config, DoTick())[1]))
    for _, labels, idle, sp in _moves(config, spent, u):
        keys = tuple(label_key(l) for l in labels)
        for m, after in _blocks(idle, sp, u):
            out.add((tuple(sorted(keys + m)), after))
    return out


def oracle(c1, c2, u):
    @lru_cache(maxsize=None)
    def rel(a, b, spent_a, spent_b):
        if a.clock >= u.horizon:
            return True
        for x, y, sx, sy in ((a, b, spent_a, spent_b), (b, a, spent_b, spent_a)):
            ys = [(label_key(ch.label), t, s) for ch, _, t, s in _moves(y, sy, u)
                  if isinstance(ch, DoAgree)]
            for ch, _, t, s in _moves(x, sx, u):
                if not isinstance(ch, DoAgree):
                    continue
                k = label_key(ch.label)
                if not any(k == k2 and (rel(t, t2, s, s2) if x is a else rel(t2, t, s2, s))
                           for k2, t2, s2 in ys):
                    return False
            yb = _blocks(y, sy, u)
            for m, after in _blocks(x, sx, u):
                if not any(m == m2 and (rel(after, a2, 0, 0) if x is a else rel(a2, after, 0, 0))
                           for m2, a2 in yb):
                    return False
        return True

    return rel(Configuration.initial(c1), Configuration.initial(c2), 0, 0)


TINY = {
    "seq": "stipula C { agreement (A,B)() {} => @Q  @Q A : f { } => @R  @R B : g { } => @Q }",
    "any": "stipula C { agreement (A,B)() {} => @Q  @Q A : f { } => @Q  @Q B : g { } => @Q }",
    "only_f": "stipula C { agreement (A,B)() {} => @Q  @Q A : f { } => @Q }",
    "f_says": 'stipula C { agreement (A,B)() {} => @Q  @Q A : f { "hi" -> A } => @Q }',
    "f_once": "stipula C { agreement (A,B)() {} => @Q  @Q A : f { } => @End }",
    "f_twice": "stipula C { agreement (A,B)() {} => @Q  @Q A : f { } => @R  @R A : f { } => @End }",
    "ev_now": 'stipula C { agreement (A,B)() {} => @Q  @Q A : f { now >> @Q { "e" -> B } => @Q } => @Q }',
    "ev_late": 'stipula C { agreement (A,B)() {} => @Q  @Q A : f { now + 1 >> @Q { "e" -> B } => @Q } => @Q }',
    "ba": "stipula C { agreement (B,A)() {} => @Q  @Q A : f { } => @Q  @Q B : g { } => @Q }",
}


@pytest.fixture(scope="module")
def tiny():
    return {k: parse_source(v) for k, v in TINY.items()}


def test_game_agrees_with_oracle(tiny):
    u = Universe(3, (AgreeL(("A", "B"), ()),), (CallL("A", "f"), CallL("B", "g")))
    disagreements = []
    verdicts = set()
    for a, b in combinations_with_replacement(sorted(tiny), 2):
        got = bisimilar(tiny[a], tiny[b], u).related
        want = oracle(tiny[a], tiny[b], u)
        verdicts.add(want)
        if got != want:
            disagreements.append((a, b, got, want))
    assert not disagreements
    assert verdicts == {True, False}


def test_agreement_matched_up_to_party_order(tiny):
    u = Universe(2, (AgreeL(("A", "B"), ()), AgreeL(("B", "A"), ())),
                 (CallL("A", "f"), CallL("B", "g")))
    assert bisimilar(tiny["any"], tiny["ba"], u).related == oracle(tiny["any"], tiny["ba"], u)
