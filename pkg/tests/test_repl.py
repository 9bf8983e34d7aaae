import io

from stipula.driver import DoAgree, DoFireEvent, DoTick, run_trace
from stipula.driver.repl import Repl, run_repl
from stipula.driver.traceio import load_script
from stipula.runtime import config_digest

from conftest import contract, script, universe


def make(name="bike_rental"):
    u = universe(name)
    out = io.StringIO()
    return Repl(contract(name), u.agrees, u.calls, out=out), out


def feed(lines):
    it = iter(lines)

    def read(_prompt):
        try:
            return next(it)
        except StopIteration:
            raise EOFError from None
    return read


def test_fresh_menu_is_agreement_or_tick():
    r, out = make()
    r.refresh()
    assert {type(c) for c in r.menu} == {DoAgree, DoTick}
    assert "(not agreed)" in out.getvalue()


def test_menu_at_deadline_is_only_the_event():
    r, _ = make()
    s = script("bike_rental.table3")
    res = run_trace(contract("bike_rental"), s, until=3602)
    r.session.config = res.final
    r.take(DoTick())
    r.refresh()
    assert r.config.clock == 3603
    assert len(r.menu) == 1 and isinstance(r.menu[0], DoFireEvent)


def test_invalid_selection_reprompts():
    r, out = make()
    r.refresh()
    before = r.config
    assert r.handle("99") is True
    assert r.config is before
    assert "pick a number" in out.getvalue()
    r.handle("dance")
    assert "expected a menu number" in out.getvalue()
    r.handle(":nope")
    assert "unknown command" in out.getvalue()


def test_typed_agreement_and_labels():
    r, out = make()
    r.refresh()
    r.handle('agree {"parties":["Alice","Bob"],"groups":'
             '[{"parties":["Alice","Bob"],"values":[2,3600]}]}')
    assert r.config.contracts[0].phase == "Inactive"
    r.handle(":labels")
    assert "Alice" in out.getvalue().split("t=0")[-1]


def test_bad_json():
    r, out = make()
    r.refresh()
    r.handle("agree {oops")
    assert "bad agree" in out.getvalue()


def test_gc_shrinks_pending():
    u = universe("alea")
    out = io.StringIO()
    r = Repl(contract("alea"), u.agrees, u.calls, out=out)
    # agree with t_before = 0, then bet late: the refund event lands in the past
    r.handle('agree {"parties":["Better1","Better2","DataProvider"],"groups":['
             '{"parties":["DataProvider","Better1","Better2"],"values":[1,"feed",0,"match"]},'
             '{"parties":["Better1","Better2"],"values":[10,0]}]}')
    while r.config.clock < 2:
        r.take(DoTick())
    r.handle('call {"party":"Better1","fn":"place_bet","args":["home"],'
             '"assets":[{"fungible":"10"}]}')
    while not r.config.contracts[0].idle:
        r.handle("1")
    memory = dict(r.config.contracts[0].memory.items())
    assert r.config.contracts[0].pending
    r.handle(":gc")
    assert not r.config.contracts[0].pending
    assert dict(r.config.contracts[0].memory.items()) == memory
    assert "dropped 1 expired event(s)" in out.getvalue()


def pick(r, text):
    """Take the first menu entry whose description contains ``text``."""
    from stipula.driver.repl import describe
    for i, ch in enumerate(r.menu, 1):
        if text in describe(ch, r.config):
            r.handle(str(i))
            return
    raise AssertionError(f"no {text!r} in menu")


def settle(r):
    while not r.config.contracts[0].idle:
        pick(r, "")


def test_save_replays_to_same_config(tmp_path):
    r, _ = make()
    r.refresh()
    pick(r, "agree")
    pick(r, "tick")
    pick(r, "offer")
    settle(r)
    pick(r, "tick")
    pick(r, "tick")
    pick(r, "accept")
    settle(r)
    path = tmp_path / "s.trace"
    r.handle(f":save {path}")
    res = run_trace(contract("bike_rental"), load_script(path))
    assert res.final.clock == r.config.clock == 3
    assert config_digest(res.final) == config_digest(r.config)


def test_quit():
    r, _ = make()
    assert r.handle(":q") is False
    assert r.handle(":help") is True


def test_loop_ends_on_eof():
    out = io.StringIO()
    repl = run_repl(contract("hello_event"), out=out, read=feed(["", ":help"]))
    assert ":save" in out.getvalue()
    assert repl.config.clock == 0
