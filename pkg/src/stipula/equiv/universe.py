"""Bounded universes: the finite alphabets and horizon a game is played in."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from decimal import Decimal

from stipula.driver.traceio import agree_from_json, agree_payload, call_from_json, call_payload
from stipula.errors import ScriptError
from stipula.runtime.state import AgreeL, CallL


@dataclass(frozen=True)
class Universe:
    """Tick-blocks are compared at every clock below ``horizon``.

    ``block_size`` caps the agreements and calls a single tick-block may
    contain, keeping each block finite.
    """
    horizon: int
    agrees: tuple = ()
    calls: tuple = ()
    block_size: int = 2

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.block_size < 1:
            raise ValueError("block_size must be at least 1")
        for a in self.agrees:
            if not isinstance(a, AgreeL):
                raise TypeError(f"not an agreement label: {a!r}")
        for c in self.calls:
            if not isinstance(c, CallL):
                raise TypeError(f"not a call label: {c!r}")

    def shifted(self, dt: int) -> "Universe":
        return replace(self, horizon=self.horizon + dt)

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "block_size": self.block_size,
                "agree": [agree_payload(a) for a in self.agrees],
                "calls": [call_payload(c) for c in self.calls]}

    @classmethod
    def from_json(cls, obj: dict) -> "Universe":
        if not isinstance(obj, dict) or "horizon" not in obj:
            raise ScriptError("a universe needs at least a 'horizon'")
        try:
            return cls(int(obj["horizon"]),
                       tuple(agree_from_json(a) for a in obj.get("agree", ())),
                       tuple(call_from_json(c) for c in obj.get("calls", ())),
                       int(obj.get("block_size", 2)))
        except (TypeError, ValueError) as exc:
            raise ScriptError(f"malformed universe: {exc}") from None


def load_universe(path) -> Universe:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"{path}: {exc.msg}") from None
    return Universe.from_json(obj)
