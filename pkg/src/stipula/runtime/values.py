"""Runtime values and asset cells.

Reals and fungible amounts are fixed-point decimals at scale 4.  Results that
do not fit exactly, or whose magnitude reaches 10**18, are errors rather
than being rounded or wrapped.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal, Inexact, InvalidOperation
from typing import Union

from stipula.errors import EvalError

SCALE = Decimal("0.0001")
LIMIT = Decimal(10) ** 18
_CTX = Context(prec=60, traps=[Inexact, InvalidOperation])


def fixed(d) -> Decimal:
    """Quantize to scale 4, raising :class:`EvalError` if that would round."""
    try:
        q = Decimal(d).quantize(SCALE, context=_CTX)
    except (Inexact, InvalidOperation):
        raise EvalError(f"{d} is not representable at scale 4") from None
    if abs(q) >= LIMIT:
        raise EvalError(f"fixed-point overflow: {q}")
    return q


@dataclass(frozen=True)
class Real:
    value: Decimal

    def __post_init__(self):
        object.__setattr__(self, "value", fixed(self.value))

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Str:
    value: str

    def __str__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Bool:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Time:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise EvalError(f"negative time {self.value}")

    def __str__(self) -> str:
        return f"t{self.value}"


@dataclass(frozen=True)
class Party:
    id: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class UsageCode:
    code: str

    def __str__(self) -> str:
        return self.code


@dataclass(frozen=True)
class PairV:
    first: "Value"
    second: "Value"

    def __str__(self) -> str:
        return f"({self.first}, {self.second})"


@dataclass(frozen=True)
class TokenV:
    """The value read from a cell holding a non-fungible token."""
    id: str

    def __str__(self) -> str:
        return f"token {self.id}"


Value = Union[Real, Str, Bool, Time, Party, UsageCode, PairV, TokenV]


# -- asset cells -------------------------------------------------------------

@dataclass(frozen=True)
class Fungible:
    amount: Decimal

    def __post_init__(self):
        amount = fixed(self.amount)
        if amount < 0:
            raise EvalError(f"negative fungible amount {amount}")
        object.__setattr__(self, "amount", amount)

    @property
    def empty(self) -> bool:
        return self.amount == 0

    def __str__(self) -> str:
        return str(self.amount)


@dataclass(frozen=True)
class Token:
    id: str
    held: bool = True

    @property
    def empty(self) -> bool:
        return not self.held

    def __str__(self) -> str:
        return f"token {self.id}" + ("" if self.held else " (released)")


AssetValue = Union[Fungible, Token]

EMPTY = Fungible(Decimal(0))


def is_asset(v) -> bool:
    return isinstance(v, (Fungible, Token))


def as_number(v: Value) -> Decimal:
    if isinstance(v, Real):
        return v.value
    if isinstance(v, Time):
        return Decimal(v.value)
    raise EvalError(f"expected a number, got {v}")


def as_time(v: Value) -> Time:
    """Coerce a time-valued guard; integral non-negative reals are accepted."""
    if isinstance(v, Time):
        return v
    if isinstance(v, Real) and v.value == v.value.to_integral_value() and v.value >= 0:
        return Time(int(v.value))
    raise EvalError(f"event guard must be a time in whole seconds, got {v}")
