from pathlib import Path

import pytest

from stipula.driver.traceio import load_script
from stipula.equiv.universe import load_universe
from stipula.syntax import parse_file

CORPUS = Path(__file__).resolve().parents[1] / "src" / "stipula" / "corpus"
CONTRACTS = sorted(p.stem for p in CORPUS.glob("*.stipula"))
LEGAL_CONTRACTS = ("bike_rental", "free_rent", "licence", "alea")


def contract(name):
    return parse_file(CORPUS / f"{name}.stipula")


def universe(name):
    return load_universe(CORPUS / f"{name}.json")


def script(name):
    return load_script(CORPUS / "traces" / f"{name}.trace")


@pytest.fixture
def bike():
    return contract("bike_rental")


def expired_configs(n, seed=0):
    """Idle, reachable alea configurations holding at least one expired event.

    Late bets against small deadlines schedule events in the past.
    """
    import random

    from stipula.driver import run_trace
    from stipula.driver.fuzz import random_script

    rng = random.Random(seed)
    decl, u = contract("alea"), universe("alea")
    found, seen = [], set()
    while len(found) < n:
        s = random_script(rng, u.agrees, u.calls)
        res = run_trace(decl, s, until=(s[-1].at if s else 0) + rng.randint(0, 3))
        for t in res.transitions:
            c = t.config
            rc = c.contracts[0]
            if rc.stuck or not rc.idle or c.key() in seen:
                continue
            if any(ev.trigger < c.clock for ev in rc.pending):
                seen.add(c.key())
                found.append(c)
    return found[:n]
