"""Random trace scripts drawn from a universe's alphabets.

Scripts perturb the template labels: numeric agreement values and call
arguments are resampled, fungible amounts vary, and time jumps range from
zero to well past any short deadline.  Every run is checked for asset
conservation and for negative fungible cells along the way.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from decimal import Decimal
from typing import Optional

from stipula.driver.session import Agree, Call, RunResult, Wait, run_trace
from stipula.errors import ConservationViolation
from stipula.runtime.conservation import conservation_report
from stipula.runtime.state import AgreeL, CallL, Configuration, TickL
from stipula.runtime.values import Fungible, Real
from stipula.syntax.ast import ContractDecl

_SMALL = ("0", "0.5", "1", "2", "3", "5", "10", "100")


def _real(rng: random.Random, v: Real) -> Real:
    roll = rng.random()
    if roll < 0.4:
        return v
    if roll < 0.8:
        return Real(Decimal(rng.randint(0, 6)))
    return Real(Decimal(rng.choice(_SMALL)))


def _value(rng: random.Random, v):
    return _real(rng, v) if isinstance(v, Real) else v


def perturb_agree(rng: random.Random, lab: AgreeL) -> AgreeL:
    groups = tuple((ps, tuple(_value(rng, v) for v in vs)) for ps, vs in lab.groups)
    return AgreeL(lab.parties, groups)


def perturb_call(rng: random.Random, lab: CallL) -> CallL:
    assets = []
    for a in lab.assets:
        if isinstance(a, Fungible) and rng.random() < 0.6:
            a = Fungible(Decimal(rng.choice(_SMALL)))
        assets.append(a)
    return replace(lab, args=tuple(_value(rng, v) for v in lab.args), assets=tuple(assets))


def _jump(rng: random.Random) -> int:
    roll = rng.random()
    if roll < 0.4:
        return 0
    if roll < 0.8:
        return rng.randint(1, 3)
    if roll < 0.95:
        return rng.randint(4, 20)
    return rng.randint(21, 400)


def random_script(rng: random.Random, agrees, calls, length: Optional[int] = None) -> list:
    """An agreement (usually) followed by perturbed calls at non-decreasing times."""
    script: list = []
    t = rng.randint(0, 2)
    if agrees and rng.random() < 0.95:
        script.append(Agree(t, perturb_agree(rng, rng.choice(agrees))))
    n = rng.randint(0, 6) if length is None else length
    for _ in range(n):
        t += _jump(rng)
        if calls and rng.random() < 0.9:
            script.append(Call(t, perturb_call(rng, rng.choice(calls))))
        else:
            script.append(Wait(t))
    return script


def negative_cells(config: Configuration) -> list[str]:
    return [f"{rc.name}.{name}" for rc in config.contracts
            for name, cell in rc.memory.items()
            if isinstance(cell, Fungible) and cell.amount < 0]


@dataclass
class FuzzReport:
    runs: int = 0
    stuck: int = 0
    rejected: int = 0
    violations: list = field(default_factory=list)  # (run index, script, message)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_run(result: RunResult) -> Optional[str]:
    """A message describing what went wrong in ``result``, or None."""
    for t in result.transitions:
        if isinstance(t.label, TickL):
            continue  # ticks never touch memory
        bad = negative_cells(t.config)
        if bad:
            return f"negative fungible cell {bad} at t={t.at}"
    try:
        conservation_report(result.labels, result.final)
    except ConservationViolation as exc:
        return str(exc)
    return None


def fuzz(decl: ContractDecl, agrees, calls, runs: int = 1000, seed: int = 0) -> FuzzReport:
    rng = random.Random(seed)
    report = FuzzReport()
    for i in range(runs):
        script = random_script(rng, agrees, calls)
        last = script[-1].at if script else 0
        result = run_trace(decl, script, until=last + rng.randint(0, 10))
        report.runs += 1
        report.stuck += result.stuck is not None
        report.rejected += len(result.rejected)
        msg = check_run(result)
        if msg is not None:
            report.violations.append((i, script, msg))
    return report


__all__ = ["FuzzReport", "check_run", "fuzz", "negative_cells", "random_script"]
