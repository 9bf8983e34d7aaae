"""Canonical ASCII pretty-printer; ``parse(pretty(d)) == d`` for parsable trees."""

from __future__ import annotations

from decimal import Decimal

from stipula.syntax import ast as A

_PREC = {"||": 1, "&&": 2, "!": 3, "rel": 4, "+": 5, "-": 5, "*": 6, "/": 6}
_ATOM = 7


def format_decimal(d: Decimal) -> str:
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _prec(e: A.Expr) -> int:
    if isinstance(e, (A.Arith, A.BoolOp)):
        return _PREC[e.op]
    if isinstance(e, A.Rel):
        return _PREC["rel"]
    if isinstance(e, A.Not):
        return _PREC["!"]
    return _ATOM


def expr_str(e: A.Expr) -> str:
    if isinstance(e, A.Now):
        return "now"
    if isinstance(e, A.RealLit):
        return format_decimal(e.value)
    if isinstance(e, A.StringLit):
        return _quote(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Intrinsic):
        inner = e.asset if e.party is None else f"{e.asset}, {e.party}"
        return f"{e.kind}({inner})"
    if isinstance(e, A.Pair):
        return f"({expr_str(e.first)}, {expr_str(e.second)})"
    if isinstance(e, A.Not):
        inner = expr_str(e.operand)
        if _prec(e.operand) < _PREC["!"]:
            inner = f"({inner})"
        return f"!{inner}"
    p = _prec(e)
    left, right = expr_str(e.left), expr_str(e.right)
    if isinstance(e, A.Rel):
        # non-associative: parenthesise anything not strictly tighter
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
    else:
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
    return f"{left} {e.op} {right}"


def stmt_lines(s: A.Stmt, indent: str) -> list[str]:
    if isinstance(s, A.FieldAssign):
        return [f"{indent}{expr_str(s.expr)} -> {s.field}"]
    if isinstance(s, A.ValueSend):
        return [f"{indent}{expr_str(s.expr)} -> {s.party}"]
    if isinstance(s, (A.AssetMove, A.AssetSend)):
        dest = s.dest if isinstance(s, A.AssetMove) else s.party
        if s.expr == A.Name(s.source):
            return [f"{indent}{s.source} -o {dest}"]
        return [f"{indent}{expr_str(s.expr)} -o {s.source}, {dest}"]
    lines = [f"{indent}({expr_str(s.cond)}) {{"]
    for inner in s.body:
        lines += stmt_lines(inner, indent + "  ")
    lines.append(f"{indent}}}")
    return lines


def event_lines(ev: A.EventDecl, indent: str) -> list[str]:
    lines = [f"{indent}{expr_str(ev.guard)} >> @{ev.state} {{"]
    for s in ev.handler:
        lines += stmt_lines(s, indent + "  ")
    lines.append(f"{indent}}} => @{ev.next_state}")
    return lines


def function_lines(fn: A.FunctionDecl, indent: str = "  ") -> list[str]:
    head = f"{indent}@{fn.state} {fn.caller} : {fn.name}"
    # empty "()" only where a precondition would otherwise read as parameters
    if fn.params or (fn.precondition is not None and not fn.asset_params):
        head += f"({', '.join(fn.params)})"
    if fn.asset_params:
        head += f"[{', '.join(fn.asset_params)}]"
    if fn.precondition is not None:
        head += f" ({expr_str(fn.precondition)})"
    lines = [head + " {"]
    for s in fn.body:
        lines += stmt_lines(s, indent + "  ")
    for ev in fn.events:
        lines += event_lines(ev, indent + "  ")
    lines.append(f"{indent}}} => @{fn.next_state}")
    return lines


def pretty(decl: A.ContractDecl) -> str:
    ag = decl.agreement
    lines = [f"stipula {decl.name} {{"]
    if decl.assets:
        lines.append(f"  assets {', '.join(decl.assets)}")
    if decl.fields:
        lines.append(f"  fields {', '.join(decl.fields)}")
    lines.append("")
    lines.append(f"  agreement ({', '.join(ag.parties)})({', '.join(ag.init_fields)}) {{")
    for who, what in ag.groups:
        lines.append(f"    {', '.join(who)} : {', '.join(what)}")
    lines.append(f"  }} => @{ag.initial_state}")
    for fn in decl.functions:
        lines.append("")
        lines += function_lines(fn)
    lines.append("}")
    return "\n".join(lines) + "\n"
