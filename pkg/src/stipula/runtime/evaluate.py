"""Expression evaluation against a memory and the current clock."""

from __future__ import annotations

import operator
from decimal import Decimal
from typing import Mapping, Optional

from stipula.errors import EvalError
from stipula.runtime.values import (
    Bool, Fungible, PairV, Party, Real, Str, Time, Token, TokenV, UsageCode, Value,
    as_number,
)
from stipula.syntax import ast as A

_NUMERIC = (Real, Time)
_RELOPS = {
    "==": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


class CodeCounter:
    """Per-contract sequence for usage codes produced by ``uses``/``use_once``."""

    def __init__(self, start: int = 0):
        self.value = start

    def next(self) -> int:
        self.value += 1
        return self.value


def read(mem: Mapping, name: str) -> Value:
    try:
        v = mem[name]
    except KeyError:
        raise EvalError(f"unbound name '{name}'") from None
    if isinstance(v, Fungible):
        return Real(v.amount)
    if isinstance(v, Token):
        return TokenV(v.id)
    return v


def _arith(op: str, a: Value, b: Value) -> Value:
    if isinstance(a, Time) or isinstance(b, Time):
        if op == "+" and not (isinstance(a, Time) and isinstance(b, Time)):
            total = as_number(a) + as_number(b)
        elif op == "-" and isinstance(a, Time):
            total = as_number(a) - as_number(b)
            if isinstance(b, Time):
                return Real(total)
        else:
            raise EvalError(f"unsupported time arithmetic: {a} {op} {b}")
        if total != total.to_integral_value():
            raise EvalError(f"time must be whole seconds, got {total}")
        return Time(int(total))
    if not (isinstance(a, Real) and isinstance(b, Real)):
        raise EvalError(f"arithmetic on non-numbers: {a} {op} {b}")
    x, y = a.value, b.value
    if op == "+":
        return Real(x + y)
    if op == "-":
        return Real(x - y)
    if op == "*":
        return Real(x * y)
    if y == 0:
        raise EvalError("division by zero")
    return Real(x / y)


def _compare(op: str, a: Value, b: Value) -> bool:
    if isinstance(a, _NUMERIC) and isinstance(b, _NUMERIC):
        x, y = as_number(a), as_number(b)
    elif type(a) is type(b):
        if op not in ("==", "!="):
            if isinstance(a, Str):
                x, y = a.value, b.value
            else:
                raise EvalError(f"ordering not defined on {type(a).__name__}")
        else:
            x, y = a, b
    else:
        raise EvalError(f"cannot compare {type(a).__name__} with {type(b).__name__}")
    return _RELOPS[op](x, y)


def _bool(v: Value) -> bool:
    if not isinstance(v, Bool):
        raise EvalError(f"expected a boolean, got {v}")
    return v.value


def eval_expr(expr: A.Expr, mem: Mapping, now: int,
              codes: Optional[CodeCounter] = None) -> Value:
    """Value of ``expr`` in ``mem`` at clock ``now``."""
    if isinstance(expr, A.Now):
        return Time(now)
    if isinstance(expr, A.RealLit):
        return Real(Decimal(expr.value))
    if isinstance(expr, A.StringLit):
        return Str(expr.value)
    if isinstance(expr, A.BoolLit):
        return Bool(expr.value)
    if isinstance(expr, A.Name):
        return read(mem, expr.id)
    if isinstance(expr, A.Pair):
        return PairV(eval_expr(expr.first, mem, now, codes),
                     eval_expr(expr.second, mem, now, codes))
    if isinstance(expr, A.Arith):
        return _arith(expr.op, eval_expr(expr.left, mem, now, codes),
                      eval_expr(expr.right, mem, now, codes))
    if isinstance(expr, A.Rel):
        return Bool(_compare(expr.op, eval_expr(expr.left, mem, now, codes),
                             eval_expr(expr.right, mem, now, codes)))
    if isinstance(expr, A.BoolOp):
        left = _bool(eval_expr(expr.left, mem, now, codes))
        # both sides are evaluated: a type error on the right is never masked
        right = _bool(eval_expr(expr.right, mem, now, codes))
        return Bool(left and right if expr.op == "&&" else left or right)
    if isinstance(expr, A.Not):
        return Bool(not _bool(eval_expr(expr.operand, mem, now, codes)))
    if isinstance(expr, A.Intrinsic):
        return _usage_code(expr, mem, codes if codes is not None else CodeCounter())
    raise EvalError(f"cannot evaluate {expr!r}")


def _usage_code(expr: A.Intrinsic, mem: Mapping, codes: CodeCounter) -> UsageCode:
    cell = mem.get(expr.asset)
    if not isinstance(cell, Token) or not cell.held:
        raise EvalError(f"{expr.kind}({expr.asset}) needs a held token")
    if expr.kind == "use_once":
        return UsageCode(f"once:{cell.id}#{codes.next()}")
    if expr.party is None:
        return UsageCode(f"use:{cell.id}#{codes.next()}")
    party = mem.get(expr.party)
    if not isinstance(party, Party):
        raise EvalError(f"'{expr.party}' is not bound to a party")
    return UsageCode(f"use:{cell.id}:{party.id}#{codes.next()}")
