from fractions import Fraction

import pytest

from pbwelfare import (
    InvalidInstanceError,
    cardinality_sat,
    cost_sat,
    instance_params,
    parse_rational,
    supporters,
    validate_instance,
)
from pbwelfare.core import format_rational, lcm_of_denominators
from pbwelfare.generators import multiwinner

from .conftest import running_example_raw


def test_example_is_valid(example):
    assert example.n == 10
    assert example.budget == 100
    assert example.project_ids == ("p1", "p2", "p3", "p4", "p5")
    assert example.total_cost(example.project_ids) == 205


def test_supporters_example(example):
    assert supporters(example, "p1") == (1, 2, 3, 4, 5, 6)
    assert supporters(example, "p5") == (9, 10)


def test_supporters_of_unapproved_project():
    inst = validate_instance({"budget": "10", "projects": [{"id": "a", "cost": "1"}], "approvals": [[]]})
    assert supporters(inst, "a") == ()


def test_params_example_cost(example):
    p = instance_params(example, cost_sat())
    assert (p.c_min, p.c_max, p.k1, p.k2) == (20, 65, Fraction(20, 13), 5)
    assert (p.mu_min, p.mu_max) == (20, 65)


def test_params_example_cardinality(example):
    p = instance_params(example, cardinality_sat())
    assert p.mu_min == p.mu_max == 1


def test_params_multiwinner():
    inst = multiwinner(k=4, c=25).instance
    p = instance_params(inst, cost_sat())
    assert p.c_min == p.c_max == 25
    assert p.k1 == p.k2 == 4


@pytest.mark.parametrize("cost", ["0", "-3"])
def test_non_positive_cost(cost):
    with pytest.raises(InvalidInstanceError, match="non-positive cost"):
        validate_instance({"budget": "10", "projects": [{"id": "a", "cost": cost}], "approvals": [["a"]]})


def test_over_budget_strict_and_lenient():
    raw = running_example_raw()
    raw["projects"].append({"id": "p6", "cost": "150"})
    raw["approvals"][0].append("p6")
    with pytest.raises(InvalidInstanceError):
        validate_instance(raw)
    warnings = []
    inst = validate_instance(raw, strict=False, warnings=warnings)
    assert "p6" not in inst.project_ids
    assert len(warnings) == 1 and "p6" in warnings[0]
    assert inst.ballot(1) == frozenset({"p1", "p2", "p3"})


def test_duplicate_and_unknown_ids():
    with pytest.raises(InvalidInstanceError, match="duplicate"):
        validate_instance(
            {"budget": "10", "projects": [{"id": "a", "cost": "1"}, {"id": "a", "cost": "2"}], "approvals": [[]]}
        )
    with pytest.raises(InvalidInstanceError):
        validate_instance({"budget": "10", "projects": [{"id": "a", "cost": "1"}], "approvals": [["zz"]]})


def test_no_voters():
    with pytest.raises(InvalidInstanceError):
        validate_instance({"budget": "10", "projects": [{"id": "a", "cost": "1"}], "approvals": []})


def test_empty_ballots_are_kept():
    inst = validate_instance({"budget": "10", "projects": [{"id": "a", "cost": "1"}], "approvals": [[], ["a"]]})
    assert inst.n == 2
    assert inst.ballot(1) == frozenset()


@pytest.mark.parametrize(
    "text, value",
    [("13/2", Fraction(13, 2)), ("12.50", Fraction(25, 2)), ("7", Fraction(7)), (3, Fraction(3))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", [0.5, True, "abc", "1/0"])
def test_parse_rational_rejects(bad):
    with pytest.raises(InvalidInstanceError):
        parse_rational(bad)


def test_format_and_lcm():
    assert format_rational(Fraction(13, 2)) == "13/2"
    assert format_rational(Fraction(4)) == "4"
    assert lcm_of_denominators([Fraction(1, 4), Fraction(1, 6), Fraction(3)]) == 12
