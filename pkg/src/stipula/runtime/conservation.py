"""Asset bookkeeping over a completed run.

Every fungible unit that entered through a call is either still held in some
asset cell or left through an asset send; every token likewise.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable

from stipula.errors import ConservationViolation
from stipula.runtime.state import AssetOutL, CallL, Configuration
from stipula.runtime.values import Fungible, Token


@dataclass(frozen=True)
class ConservationReport:
    received: Decimal = Decimal("0.0000")
    held: Decimal = Decimal("0.0000")
    emitted: Decimal = Decimal("0.0000")
    tokens_in: Counter = field(default_factory=Counter)
    tokens_held: Counter = field(default_factory=Counter)
    tokens_out: Counter = field(default_factory=Counter)

    def summary(self) -> str:
        return (f"in {self.received}, out {self.emitted}, held {self.held}; "
                f"tokens in {sorted(self.tokens_in.elements())}, "
                f"out {sorted(self.tokens_out.elements())}, "
                f"held {sorted(self.tokens_held.elements())}")


def conservation_report(labels: Iterable, final: Configuration) -> ConservationReport:
    """Check the ledger of ``labels`` against ``final``; raise on any imbalance."""
    received = emitted = held = Decimal("0.0000")
    t_in, t_out, t_held = Counter(), Counter(), Counter()
    for lab in labels:
        if isinstance(lab, CallL):
            for a in lab.assets:
                if isinstance(a, Token):
                    t_in[a.id] += 1
                else:
                    received += a.amount
        elif isinstance(lab, AssetOutL):
            if isinstance(lab.asset, Token):
                t_out[lab.asset.id] += 1
            else:
                emitted += lab.asset.amount
    for rc in final.contracts:
        for cell in rc.memory.values():
            if isinstance(cell, Fungible):
                held += cell.amount
            elif isinstance(cell, Token) and cell.held:
                t_held[cell.id] += 1
    report = ConservationReport(received, held, emitted, t_in, t_held, t_out)
    if received != held + emitted:
        raise ConservationViolation(f"fungible imbalance: {report.summary()}")
    if t_in != t_held + t_out:
        raise ConservationViolation(f"token imbalance: {report.summary()}")
    dup = [t for t, n in t_held.items() if n > 1]
    if dup:
        raise ConservationViolation(f"token held twice: {dup}")
    return report
