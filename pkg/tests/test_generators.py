from fractions import Fraction

import pytest

from pbwelfare import (
    check_dns,
    cost_sat,
    run_greedy,
    run_maxsat,
    run_mes_completed,
    utilitarian_ratio,
    utilitarian_welfare,
)
from pbwelfare.generators import (
    KINDS,
    ConstructionError,
    ConstructionSpec,
    bounded_sat_worstcase,
    ejr1_tight,
    gen_random,
    generate,
    greedy_tight,
    mismatch_tight,
    multiwinner,
    non_dns_worstcase,
    smallest_n_eps,
    vanishing_sat_worstcase,
)
from pbwelfare.rules import run_rule


def ratio_of(con, rule):
    outcome, _ = run_rule(con.instance, con.rule_fn, rule)
    return utilitarian_ratio(con.instance, con.fn, outcome)


def test_bounded_sat_layout():
    con = bounded_sat_worstcase(n=10, b=100, eps=Fraction(9, 10))
    inst = con.instance
    assert inst.cost("p1") == 100 and inst.cost("p2") == 9
    assert set(inst.project_ids) == {"p1", "p2"}
    assert run_greedy(inst, con.fn)[0].selected == ("p2",)
    assert run_mes_completed(inst, con.fn)[0].selected == ("p2",)
    assert ratio_of(con, "mes-greedy") == Fraction(1, 9)


@pytest.mark.parametrize("n", [3, 5, 10, 50])
def test_bounded_sat_ratio(n):
    con = bounded_sat_worstcase(n=n)
    assert ratio_of(con, "greedy") == ratio_of(con, "mes-greedy") == con.expected["ratio"] == Fraction(1, n - 1)


def test_bounded_sat_rejects_small_n():
    with pytest.raises(ConstructionError):
        bounded_sat_worstcase(n=2)


@pytest.mark.parametrize("delta", [Fraction(1, 10), Fraction(1, 1000)])
def test_vanishing_sat(delta):
    con = vanishing_sat_worstcase(delta=delta)
    r = ratio_of(con, "mes-greedy")
    assert r == con.expected["ratio"] < delta


def test_non_dns_default():
    con = non_dns_worstcase(eps=Fraction(1, 1000))
    assert not check_dns(con.fn, con.instance).is_dns
    assert con.expected["n"] == 5 and con.expected["k"] == 4
    r = ratio_of(con, "mes-greedy")
    assert r == Fraction(16, 25000 + 8)
    assert r <= Fraction(1, 1000)


def test_non_dns_rejects_tiny_n():
    with pytest.raises(ConstructionError):
        non_dns_worstcase(n=1)


def test_greedy_tight_default():
    con = greedy_tight(x=10, n=1000, eps=Fraction(1, 100))
    r = ratio_of(con, "greedy")
    assert r == con.expected["ratio"] == Fraction(101, 111)
    assert run_maxsat(con.instance, con.fn).selected == tuple(con.expected["selected"]["maxsat"])


def test_greedy_tight_approaches_limit():
    gaps = []
    for n, eps in [(20, Fraction(1, 20)), (100, Fraction(1, 50)), (1000, Fraction(1, 100)), (10**4, Fraction(1, 1000))]:
        con = greedy_tight(x=10, n=n, eps=eps)
        r = ratio_of(con, "greedy")
        assert r >= con.expected["limit"]
        gaps.append(r - Fraction(9, 10))
    assert gaps == sorted(gaps, reverse=True)


@pytest.mark.parametrize("k1, k2", [(4, 25), (3, 9), (2, 16)])
def test_ejr1_tight_ratio(k1, k2):
    con = ejr1_tight(100, k1, k2)
    assert con.instance.n == k2
    r = ratio_of(con, "mes-greedy")
    assert r <= con.expected["ratio_upper"]
    assert utilitarian_welfare(con.fn, con.instance, run_maxsat(con.instance, con.fn).selected) == con.expected["uw_opt"]


def test_ejr1_x_sequence():
    # k1 = a - 1, k2 = a^2 drives x = (a - 1)/a towards 1
    xs = [ejr1_tight(100, a - 1, a * a).expected["x"] for a in (3, 4, 5, 6)]
    assert xs == [Fraction(a - 1, a) for a in (3, 4, 5, 6)]


def brute_smallest_n(r, eps, limit=500):
    for n in range(1, limit):
        if (n * r).denominator != 1 and -(-(n * r).numerator // (n * r).denominator) <= (n + eps) * r:
            return n
    return None


@pytest.mark.parametrize(
    "r, eps",
    [(Fraction(2, 7), Fraction(1, 2)), (Fraction(5, 9), Fraction(1, 5)), (Fraction(81, 100), Fraction(1, 50))],
)
def test_smallest_n_eps(r, eps):
    assert smallest_n_eps(r, eps) == brute_smallest_n(r, eps)


def test_smallest_n_eps_impossible():
    assert brute_smallest_n(Fraction(1, 3), Fraction(1, 2)) is None
    with pytest.raises(ConstructionError):
        smallest_n_eps(Fraction(1, 3), Fraction(1, 2))


def test_mismatch_tight():
    con = mismatch_tight(100, 2, 10, Fraction(1, 100), n=1000)
    r = ratio_of(con, "greedy")
    assert r == con.expected["ratio"]
    bound = con.expected["bound"]
    assert bound <= r <= bound * Fraction(105, 100)


def test_mismatch_tight_default_n():
    con = mismatch_tight()
    r = ratio_of(con, "greedy")
    assert con.expected["n_eps_condition"]
    assert con.expected["bound"] <= r <= con.expected["ratio_upper"]


def test_multiwinner_unanimous():
    con = multiwinner(k=4, c=25, n=2)
    assert con.instance.budget == 100
    ratios = {ratio_of(con, rule) for rule in ("greedy", "mes-greedy", "maxsat")}
    assert ratios == {1}


def test_random_reproducible():
    assert gen_random(7) == gen_random(7)
    assert gen_random(7) != gen_random(8)


def test_random_batch_valid():
    for seed in range(1000):
        inst = gen_random(seed)
        assert 1 <= inst.n <= 12 and 1 <= len(inst.projects) <= 10
        assert all(0 < p.cost <= inst.budget for p in inst.projects)
        assert all(p.cost.denominator <= 4 for p in inst.projects)


def test_random_integer_costs():
    for seed in range(50):
        assert all(p.cost.denominator == 1 for p in gen_random(seed, cost_denominator_bound=1).projects)


def test_generate_dispatch_with_strings():
    con = generate(ConstructionSpec("ejr1_tight", {"b": "100", "k1": "4", "k2": "25"}))
    assert con.expected["ratio_upper"] == Fraction(4, 25)
    con = generate(ConstructionSpec("bounded_sat_worstcase", {"n": "5", "sat": "card"}))
    assert con.fn.name == "card"
    assert generate(ConstructionSpec("random", {"seed": "3"})).instance == gen_random(3)
    assert set(KINDS) >= {"ejr1_tight", "random", "multiwinner"}


def test_generate_errors():
    with pytest.raises(ConstructionError):
        generate(ConstructionSpec("ejr1_tight", {"k1": "5/2"}))
    with pytest.raises(ValueError):
        generate(ConstructionSpec("nonsense", {}))
