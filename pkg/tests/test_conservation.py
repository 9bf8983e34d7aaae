from dataclasses import replace
from decimal import Decimal

import pytest

from stipula.driver import run_trace
from stipula.driver.fuzz import check_run, fuzz, random_script
from stipula.errors import ConservationViolation
from stipula.runtime import AssetOutL, Fungible, Token, conservation_report

from conftest import CONTRACTS, contract, script, universe


def _doctor(config, **cells):
    rc = config.contracts[0]
    return config.with_contract(replace(rc, memory=rc.memory.set(**cells)))


def test_detects_created_value():
    res = run_trace(contract("bike_rental"), script("bike_rental.table3"))
    bad = _doctor(res.final, wallet=Fungible(Decimal(3)))
    with pytest.raises(ConservationViolation, match="fungible"):
        conservation_report(res.labels, bad)


def test_detects_duplicated_token():
    res = run_trace(contract("licence"), script("licence.buy"))
    labels = res.labels + [AssetOutL(Token("ebook"), "Licensee")]
    with pytest.raises(ConservationViolation, match="token"):
        conservation_report(labels, res.final)


def test_token_summary():
    res = run_trace(contract("licence"), script("licence.buy"))
    rep = conservation_report(res.labels, res.final)
    assert rep.tokens_in["ebook"] == 1 and rep.tokens_out["ebook"] == 1
    assert rep.held == 0 and rep.emitted == Decimal(100)
    assert "ebook" in rep.summary()


@pytest.mark.parametrize("name", CONTRACTS)
def test_fuzz_small(name):
    u = universe(name)
    report = fuzz(contract(name), u.agrees, u.calls, runs=100, seed=7)
    assert report.ok, report.violations[:1]


def test_scripts_are_well_formed():
    import random
    rng = random.Random(0)
    u = universe("alea")
    for _ in range(50):
        s = random_script(rng, u.agrees, u.calls)
        assert [t.at for t in s] == sorted(t.at for t in s)


def test_check_run_flags_negative_cell():
    res = run_trace(contract("bike_rental"), script("bike_rental.table3"))
    t = res.transitions[-1]
    rc = t.config.contracts[0]
    # bypass the constructor check to forge an impossible cell
    neg = object.__new__(Fungible)
    object.__setattr__(neg, "amount", Decimal(-1))
    forged = t.config.with_contract(replace(rc, memory=rc.memory.set(wallet=neg)))
    res.transitions[-1] = replace(t, config=forged)
    assert "negative" in check_run(res)
