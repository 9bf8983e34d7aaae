import random

import pytest

from stipula.equiv import (
    LAWS, LawContext, LawInstance, check_law, compare_orders, random_context,
    random_instance, violating_instance,
)
from stipula.equiv.laws import VIOLATIONS, kind, side_conditions, writes
from stipula.errors import SideConditionViolated
from stipula.syntax import parse_stmts
from stipula.syntax import ast as A


def pair(law, text):
    s1, s2 = parse_stmts(text, ("A", "B"))
    return LawInstance(law, s1, s2)


def test_kinds_and_writes():
    s = parse_stmts("1 -> A  x0 -> x1  2 -o h0, B  2 -o h0, h1", ("A", "B"))
    assert [kind(x) for x in s] == ["value", "assign", "asset_send", "asset_move"]
    assert [set(writes(x)) for x in s] == [set(), {"x1"}, {"h0"}, {"h0", "h1"}]


def test_law1_top_level():
    assert check_law(1, pair(1, '"a" -> A  "b" -> B')).related


def test_law10_disjoint_assets():
    assert check_law(10, pair(10, "1 -o h0, h1  1 -o h2, h3")).related


def test_law3_violation_raises_and_differs():
    bad = pair(3, "5 -> x0  x0 -> x1")  # x0 is agreed as 1
    with pytest.raises(SideConditionViolated, match="x0"):
        check_law(3, bad)
    assert not compare_orders(bad).related


def test_kind_mismatch():
    with pytest.raises(ValueError, match="relates"):
        side_conditions(pair(2, '"a" -> A  "b" -> B'))


def test_unknown_law():
    with pytest.raises(ValueError):
        side_conditions(pair(11, '"a" -> A  "b" -> B'))


def test_law_id_mismatch():
    with pytest.raises(ValueError, match="not 2"):
        check_law(2, pair(1, '"a" -> A  "b" -> B'))


def test_both_drawing_usage_codes_rejected():
    assert any("usage codes" in p for p in
               side_conditions(pair(1, "uses(h0) -> A  uses(h1) -> B")))


@pytest.mark.parametrize("law", sorted(VIOLATIONS))
def test_violations_not_related(law):
    inst = violating_instance(law)
    assert side_conditions(inst)
    with pytest.raises(SideConditionViolated):
        check_law(law, inst)
    assert not compare_orders(inst).related


@pytest.mark.parametrize("law", sorted(LAWS))
def test_random_instances(law):
    rng = random.Random(law)
    for _ in range(5):
        inst = random_instance(law, rng)
        assert not side_conditions(inst)
        assert (kind(inst.first), kind(inst.second)) == LAWS[law]
        assert check_law(law, inst, random_context(rng)).related, str(inst)


@pytest.mark.parametrize("position", ["top", "cond", "event"])
def test_positions(position):
    ctx = LawContext(position=position, guard=A.Rel(">=", A.Name("h0"), A.RealLit(1)), delay=1)
    assert check_law(8, pair(8, "1 -o h1, A  1 -o h2, B"), ctx).related


def test_bad_position():
    with pytest.raises(ValueError):
        LawContext(position="nowhere").fill(())
