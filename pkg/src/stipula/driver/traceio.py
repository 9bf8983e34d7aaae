"""JSON-lines encoding of trace scripts and run results.

Values are tagged objects (``{"real": "2.0000"}``, ``{"str": "hi"}``, ...).
On input, plain JSON numbers, strings and booleans are accepted as reals,
strings and booleans.  Decimals are always written at scale 4.
"""

from __future__ import annotations

import json
from decimal import Decimal
from typing import Iterable, Iterator

from stipula.driver.session import Agree, Call, Rejection, RunResult, Transaction, Wait
from stipula.errors import EvalError, ScriptError
from stipula.runtime.state import AgreeL, AssetOutL, CallL, Silent, TickL, ValueOutL
from stipula.runtime.values import (
    Bool, Fungible, PairV, Party, Real, Str, Time, Token, TokenV, UsageCode, fixed,
)


def dec(d: Decimal) -> str:
    return str(fixed(d))


# -- values ------------------------------------------------------------------

def value_to_json(v):
    if isinstance(v, Real):
        return {"real": dec(v.value)}
    if isinstance(v, Str):
        return {"str": v.value}
    if isinstance(v, Bool):
        return {"bool": v.value}
    if isinstance(v, Time):
        return {"time": v.value}
    if isinstance(v, Party):
        return {"party": v.id}
    if isinstance(v, UsageCode):
        return {"code": v.code}
    if isinstance(v, PairV):
        return {"pair": [value_to_json(v.first), value_to_json(v.second)]}
    if isinstance(v, TokenV):
        return {"token": v.id}
    raise TypeError(f"not a value: {v!r}")


def value_from_json(obj):
    if isinstance(obj, bool):
        return Bool(obj)
    if isinstance(obj, (int, Decimal)):
        return Real(Decimal(obj))
    if isinstance(obj, float):
        return Real(Decimal(repr(obj)))
    if isinstance(obj, str):
        return Str(obj)
    if isinstance(obj, dict) and len(obj) == 1:
        (tag, x), = obj.items()
        if tag == "real":
            return Real(Decimal(str(x)))
        if tag == "str":
            return Str(x)
        if tag == "bool":
            return Bool(bool(x))
        if tag == "time":
            return Time(int(x))
        if tag == "party":
            return Party(x)
        if tag == "code":
            return UsageCode(x)
        if tag == "token":
            return TokenV(x)
        if tag == "pair":
            a, b = x
            return PairV(value_from_json(a), value_from_json(b))
    raise ScriptError(f"cannot read a value from {obj!r}")


def asset_to_json(a):
    if isinstance(a, Token):
        return {"token": a.id}
    return {"fungible": dec(a.amount)}


def asset_from_json(obj):
    if isinstance(obj, dict) and len(obj) == 1:
        (tag, x), = obj.items()
        if tag == "fungible":
            return Fungible(Decimal(str(x)))
        if tag == "token":
            return Token(str(x))
    if isinstance(obj, (int, Decimal, str)) and not isinstance(obj, bool):
        return Fungible(Decimal(str(obj)))
    raise ScriptError(f"cannot read an asset from {obj!r}")


# -- labels ------------------------------------------------------------------

def agree_payload(lab: AgreeL) -> dict:
    return {"parties": list(lab.parties),
            "groups": [{"parties": list(p), "values": [value_to_json(v) for v in vs]}
                       for p, vs in lab.groups]}


def call_payload(lab: CallL) -> dict:
    return {"party": lab.party, "fn": lab.fn,
            "args": [value_to_json(v) for v in lab.args],
            "assets": [asset_to_json(a) for a in lab.assets]}


def label_to_json(at: int, label, rule: str) -> dict:
    if isinstance(label, AgreeL):
        body = {"kind": "agree", **agree_payload(label)}
    elif isinstance(label, CallL):
        body = {"kind": "call", **call_payload(label)}
    elif isinstance(label, ValueOutL):
        body = {"kind": "value_out", "to": label.party, "value": value_to_json(label.value)}
    elif isinstance(label, AssetOutL):
        if isinstance(label.asset, Token):
            body = {"kind": "asset_out", "to": label.party, "token": label.asset.id}
        else:
            body = {"kind": "asset_out", "to": label.party, "amount": dec(label.asset.amount)}
    elif isinstance(label, TickL):
        body = {"kind": "tick"}
    elif isinstance(label, Silent):
        body = {"kind": "silent"}
    else:
        raise TypeError(f"not a label: {label!r}")
    return {"at": at, **body, "rule": rule}


def agree_from_json(obj: dict) -> AgreeL:
    try:
        groups = tuple((tuple(g["parties"]), tuple(value_from_json(v) for v in g["values"]))
                       for g in obj.get("groups", ()))
        return AgreeL(tuple(obj["parties"]), groups)
    except (KeyError, TypeError, EvalError) as exc:
        raise ScriptError(f"malformed agreement {obj!r}: {exc}") from None


def call_from_json(obj: dict) -> CallL:
    try:
        return CallL(obj["party"], obj["fn"],
                     tuple(value_from_json(v) for v in obj.get("args", ())),
                     tuple(asset_from_json(a) for a in obj.get("assets", ())))
    except (KeyError, TypeError, EvalError) as exc:
        raise ScriptError(f"malformed call {obj!r}: {exc}") from None


# -- scripts -----------------------------------------------------------------

def transaction_to_json(txn: Transaction) -> dict:
    if isinstance(txn, Agree):
        return {"at": txn.at, "kind": "agree", **agree_payload(txn.label)}
    if isinstance(txn, Call):
        return {"at": txn.at, "kind": "call", **call_payload(txn.label)}
    return {"at": txn.at, "kind": "wait"}


def transaction_from_json(obj: dict) -> Transaction:
    if not isinstance(obj, dict) or "at" not in obj or "kind" not in obj:
        raise ScriptError(f"a transaction needs 'at' and 'kind': {obj!r}")
    try:
        at = int(obj["at"])
    except (TypeError, ValueError):
        raise ScriptError(f"bad time {obj['at']!r}") from None
    if at < 0:
        raise ScriptError(f"negative time {at}")
    kind = obj["kind"]
    if kind == "agree":
        return Agree(at, agree_from_json(obj))
    if kind == "call":
        return Call(at, call_from_json(obj))
    if kind == "wait":
        return Wait(at)
    raise ScriptError(f"unknown transaction kind {kind!r}")


def loads_json(line: str):
    return json.loads(line, parse_float=Decimal)


def read_script(lines: Iterable[str]) -> list[Transaction]:
    script: list[Transaction] = []
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("//") or line.startswith("#"):
            continue
        try:
            obj = loads_json(line)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"line {n}: {exc.msg}") from None
        txn = transaction_from_json(obj)
        if script and txn.at < script[-1].at:
            raise ScriptError(f"line {n}: times must be non-decreasing")
        script.append(txn)
    return script


def load_script(path) -> list[Transaction]:
    with open(path, encoding="utf-8") as fh:
        return read_script(fh)


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def write_script(script: Iterable[Transaction]) -> str:
    return "".join(dumps(transaction_to_json(t)) + "\n" for t in script)


def _rejection_json(r: Rejection) -> dict:
    return {"at": r.at, "kind": "rejected", "action": transaction_to_json(r.txn),
            "reason": r.reason}


def result_lines(result: RunResult, hide_silent: bool = False) -> Iterator[str]:
    """Label stream of ``result`` with rejections at the point they happened."""
    for item in result.log:
        if isinstance(item, Rejection):
            yield dumps(_rejection_json(item))
        elif not (hide_silent and isinstance(item.label, (Silent, TickL))):
            yield dumps(label_to_json(item.at, item.label, item.rule))
    if result.stuck:
        yield dumps({"at": result.final.clock, "kind": "stuck", "reason": result.stuck})
