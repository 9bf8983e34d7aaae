from dataclasses import fields, is_dataclass
from decimal import Decimal

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from stipula.errors import ParseError
from stipula.syntax import ast as A
from stipula.syntax import check_wellformed, errors, parse_source, parse_stmts, pretty

from conftest import CONTRACTS, contract


def test_bike_rental_shape(bike):
    assert bike.name == "Bike_Rental"
    assert bike.assets == ("wallet",)
    assert bike.fields == ("cost", "rent_time", "use_code")
    assert [f.name for f in bike.functions] == ["offer", "accept", "end"]
    accept = bike.functions[1]
    assert accept.asset_params == ("y",)
    assert accept.precondition == A.Rel("==", A.Name("y"), A.Name("cost"))
    ev, = accept.events
    assert (ev.state, ev.next_state) == ("Using", "End")


def test_licence_shape():
    lic = contract("licence")
    assert lic.agreement.parties == ("Licensor", "Licensee", "Authority")
    assert [f.name for f in lic.functions] == [
        "offerLicence", "activateLicence", "buy", "compensateLicensor", "compensateLicensee"]


def test_empty_body():
    decl = parse_source("stipula C { agreement (A)() { } => @Q  @Q A : f { } => @Q }")
    f, = decl.functions
    assert f.body == () and f.events == ()


def test_spans_are_kept(bike):
    assert bike.functions[1].span.line == 14
    assert bike.functions[1].body[0].span is not None


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_source("stipula C {\n  agreement (A)() { } => Q\n}")
    assert exc.value.line == 2


def test_shorthand_asset_send():
    s, = parse_stmts("wallet -o Lender", parties=("Lender",))
    assert s == A.AssetSend(A.Name("wallet"), "wallet", "Lender")


def test_precedence():
    s, = parse_stmts("(a || b && !c) { 1 -> x }")
    assert s.cond == A.BoolOp("||", A.Name("a"),
                              A.BoolOp("&&", A.Name("b"), A.Not(A.Name("c"))))
    s, = parse_stmts("a - b - c * d -> x")
    assert s.expr == A.Arith("-", A.Arith("-", A.Name("a"), A.Name("b")),
                             A.Arith("*", A.Name("c"), A.Name("d")))


@pytest.mark.parametrize("name", CONTRACTS)
def test_corpus_round_trip(name):
    decl = contract(name)
    assert parse_source(pretty(decl)) == decl


def _node_types(obj, acc):
    if isinstance(obj, tuple):
        for x in obj:
            _node_types(x, acc)
    elif is_dataclass(obj):
        acc.add(type(obj).__name__)
        for f in fields(obj):
            _node_types(getattr(obj, f.name), acc)
    return acc


def test_grammar_coverage():
    seen = set()
    for name in CONTRACTS:
        _node_types(contract(name), seen)
    productions = {
        "Now", "RealLit", "StringLit", "BoolLit", "Name", "Pair", "Arith", "Rel", "BoolOp",
        "Not", "Intrinsic", "FieldAssign", "ValueSend", "AssetMove", "AssetSend", "If",
        "EventDecl", "FunctionDecl", "AgreementDecl", "ContractDecl",
    }
    assert productions <= seen
    fns = [f for n in CONTRACTS for f in contract(n).functions]
    assert any(f.precondition is not None for f in fns)
    assert any(f.params and f.asset_params for f in fns)
    assert any(not f.body and not f.events for f in fns)


# -- random well-formed contracts -------------------------------------------

FIELDS = ("x", "y")
ASSETS = ("h", "k")
PARTIES = ("A", "B")

literals = st.one_of(
    st.decimals(min_value=0, max_value=1000, places=2, allow_nan=False,
                allow_infinity=False).map(A.RealLit),
    st.text("abc xyz_-", max_size=5).map(A.StringLit),
    st.booleans().map(A.BoolLit),
    st.just(A.Now()),
)
names = st.sampled_from(FIELDS + ASSETS + PARTIES).map(A.Name)
intrinsics = st.one_of(
    st.builds(A.Intrinsic, st.just("uses"), st.sampled_from(ASSETS),
              st.sampled_from((None,) + PARTIES)),
    st.builds(A.Intrinsic, st.just("use_once"), st.sampled_from(ASSETS)))
leaf = st.one_of(literals, names, intrinsics)


def _grow(children):
    return st.one_of(
        st.builds(A.Arith, st.sampled_from("+-*/"), children, children),
        st.builds(A.Rel, st.sampled_from(("==", "!=", "<", "<=", ">", ">=")), children, children),
        st.builds(A.BoolOp, st.sampled_from(("&&", "||")), children, children),
        st.builds(A.Not, children),
    )


exprs = st.recursive(leaf, _grow, max_leaves=6)


def stmts(depth=2):
    simple = st.one_of(
        st.builds(A.FieldAssign, exprs, st.sampled_from(FIELDS)),
        st.builds(A.ValueSend, st.one_of(exprs, st.builds(A.Pair, exprs, exprs)),
                  st.sampled_from(PARTIES)),
        st.builds(A.AssetMove, exprs, st.sampled_from(ASSETS), st.sampled_from(ASSETS)),
        st.builds(A.AssetSend, exprs, st.sampled_from(ASSETS), st.sampled_from(PARTIES)),
    )
    if depth == 0:
        return simple
    return st.one_of(simple, st.builds(A.If, exprs, st.lists(stmts(depth - 1), max_size=2)
                                       .map(tuple)))


states = st.sampled_from(("Q", "R", "S"))
events = st.builds(A.EventDecl, exprs, states, st.lists(stmts(1), max_size=2).map(tuple), states)


@st.composite
def contracts(draw):
    fns = []
    for i in range(draw(st.integers(1, 3))):
        fns.append(A.FunctionDecl(
            draw(states), draw(st.sampled_from(PARTIES)), f"f{i}",
            tuple(draw(st.sampled_from(((), ("z",))))),
            tuple(draw(st.sampled_from(((), ("w",))))),
            draw(st.one_of(st.none(), exprs)),
            tuple(draw(st.lists(stmts(), max_size=3))),
            tuple(draw(st.lists(events, max_size=1))),
            draw(states)))
    agreement = A.AgreementDecl(PARTIES, FIELDS, ((("A",), ("x",)), (("A", "B"), ("y",))), "Q")
    return A.ContractDecl("Gen", ASSETS, FIELDS, agreement, tuple(fns))


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(contracts())
def test_round_trip_random(decl):
    # well-formedness is irrelevant to printing, but check it does not crash
    errors(check_wellformed(decl))
    assert parse_source(pretty(decl)) == decl
