"""
One test per acceptance criterion. Each prints a single PASS/FAIL line,
also collected in the terminal summary.
"""

import os
import time
from fractions import Fraction

from pbwelfare import (
    brute_force_maxsat,
    cardinality_sat,
    check_dns,
    check_ejr1,
    cost_sat,
    gen_random,
    guarantee_bounds,
    run_greedy,
    run_maxsat,
    run_mes_completed,
    utilitarian_ratio,
    utilitarian_welfare,
)
from pbwelfare.formats import emit_native, emit_report, parse_native, parse_pabulib
from pbwelfare.generators import (
    bounded_sat_worstcase,
    ejr1_tight,
    greedy_tight,
    mismatch_tight,
    non_dns_worstcase,
    vanishing_sat_worstcase,
)
from pbwelfare.guarantees import floor_sqrt
from pbwelfare.rules import run_rule
from pbwelfare.sweep import Source, SweepConfig, exit_code, run_sweep

from .conftest import record_acceptance
from .make_golden import GOLDEN_CONFIG


def _check(number, title, conditions, detail=""):
    passed = all(conditions.values())
    failed = [name for name, ok in conditions.items() if not ok]
    record_acceptance(number, title, passed, detail if passed else f"failed: {', '.join(failed)}")
    assert passed, failed


def _ratio(con, rule):
    outcome, _ = run_rule(con.instance, con.rule_fn, rule)
    return utilitarian_ratio(con.instance, con.fn, outcome)


def test_ac01_running_example(example):
    start = time.perf_counter()
    fn = cost_sat()
    greedy = run_greedy(example, fn)[0]
    maxsat = run_maxsat(example, fn)
    mes = run_mes_completed(example, fn)[0]
    uw = lambda o: utilitarian_welfare(fn, example, o.selected)  # noqa: E731
    elapsed = time.perf_counter() - start
    _check(1, "running example outcomes and ratios", {
        "greedy": greedy.as_set() == {"p1", "p4"} and uw(greedy) == 450,
        "maxsat": maxsat.as_set() == {"p2", "p3"} and uw(maxsat) == 460,
        "mes": mes.as_set() == {"p3", "p4", "p5"} and uw(mes) == 260,
        "ratios": (uw(greedy) / uw(maxsat), uw(mes) / uw(maxsat)) == (Fraction(45, 46), Fraction(13, 23)),
        "runtime": elapsed < 1,
    }, f"{elapsed:.3f}s")


def test_ac02_ejr1_running_example(example):
    start = time.perf_counter()
    fn = cost_sat()
    violated = check_ejr1(example, fn, run_greedy(example, fn)[0].selected)
    satisfied = check_ejr1(example, fn, run_mes_completed(example, fn)[0].selected)
    elapsed = time.perf_counter() - start
    _check(2, "EJR1 witness on the running example", {
        "greedy violated": not violated.satisfied,
        "witness": violated.witness is not None
        and (violated.witness.T, violated.witness.group) == (("p5",), (9, 10)),
        "mes satisfied": satisfied.satisfied,
        "runtime": elapsed < 1,
    }, f"{elapsed:.3f}s")


def test_ac03_falsification_sweep():
    start = time.perf_counter()
    config = SweepConfig(
        [Source("random", 1000, {"seed": 0})],
        rules=("greedy", "mes-greedy", "maxsat"),
        sat_fns=("cost", "card", "sqrt"),
        jobs=min(4, os.cpu_count() or 1),
    )
    rows = run_sweep(config)
    elapsed = time.perf_counter() - start
    _check(3, "1000-instance bound falsification sweep", {
        "row count": len(rows) == 1000 * 3 * 3,
        "no errors": not any("error" in r for r in rows),
        "every bound holds": all(r["bound_holds"] is True for r in rows),
        "exit code 0": exit_code(rows) == 0,
        "runtime": elapsed < 120,
    }, f"{len(rows)} rows, {elapsed:.1f}s")


def test_ac04_ejr1_tightness():
    con = ejr1_tight(100, 4, 25)
    ratio = _ratio(con, "mes-greedy")
    bound = guarantee_bounds(100, 4, 25).ejr1_upper_bound
    cells = {}
    for k1 in range(2, 6):
        for k2 in (9, 16, 25, 36):
            cell = ejr1_tight(100, k1, k2)
            cells[(k1, k2)] = _ratio(cell, "mes-greedy") <= cell.expected["ratio_upper"]
    _check(4, "EJR1 upper bound is tight and never exceeded", {
        "ratio 4/25": ratio == Fraction(4, 25),
        "equals bound": bound == ratio,
        "grid": all(cells.values()),
    }, f"{len(cells)} grid cells")


def test_ac05_bad_satisfaction_constructions():
    bounded = {n: _ratio(bounded_sat_worstcase(n=n, eps=Fraction(9, 10), fn=cardinality_sat()), "mes-greedy")
               for n in (5, 10, 50)}
    vanishing = _ratio(vanishing_sat_worstcase(delta=Fraction(1, 1000)), "mes-greedy")
    non_dns = non_dns_worstcase(eps=Fraction(1, 1000))
    _check(5, "bounded, vanishing and non-DNS worst cases", {
        "bounded 1/(n-1)": all(r == Fraction(1, n - 1) for n, r in bounded.items()),
        "vanishing < 1e-3": vanishing < Fraction(1, 1000),
        "non-DNS ratio <= 1e-3": _ratio(non_dns, "mes-greedy") <= Fraction(1, 1000),
        "non-DNS detected": not check_dns(non_dns.fn, non_dns.instance).is_dns,
    })


def test_ac06_greedy_tightness():
    con = greedy_tight(x=10, n=1000, eps=Fraction(1, 100))
    ratio = _ratio(con, "greedy")
    b = con.instance.budget
    c_max = max(p.cost for p in con.instance.projects)
    limit = (b - c_max) / b
    formula = Fraction(1000, 999) * (1 + Fraction(1, 100) - c_max / b)
    _check(6, "greedy guarantee approached from above", {
        "from above": ratio >= limit,
        "within 2e-2": ratio - limit <= Fraction(2, 100),
        "closed form": ratio == formula,
    }, f"ratio {float(ratio):.6f} vs {float(limit):.6f}")


def test_ac07_closed_forms():
    example = guarantee_bounds(10**6, 10**4, 3 * 10**4).mes_bound
    equal_cost = guarantee_bounds(100, 1, 1).mes_bound
    identities = {}
    for k in (4, 9, 16, 25, 100):
        c = Fraction(3)
        bound = guarantee_bounds(k * c, c, c).mes_bound
        identities[k] = bound.exact and bound.lo == Fraction(2, floor_sqrt(Fraction(k))) - Fraction(2, k)
    _check(7, "closed-form bound spot checks", {
        "0.16 exact": example.exact and example.lo == Fraction(16, 100),
        "0.18 exact": equal_cost.exact and equal_cost.lo == Fraction(18, 100),
        "multiwinner identity": all(identities.values()),
    })


def test_ac08_maxsat_oracle():
    start = time.perf_counter()
    mismatches = []
    for seed in range(200):
        inst = gen_random(seed, p_range=(1, 15))
        fn = (cost_sat(), cardinality_sat())[seed % 2]
        fast = utilitarian_welfare(fn, inst, run_maxsat(inst, fn).selected)
        slow = utilitarian_welfare(fn, inst, brute_force_maxsat(inst, fn).selected)
        if fast != slow:
            mismatches.append(seed)
    elapsed = time.perf_counter() - start
    _check(8, "MaxSat matches brute force on 200 instances", {
        "equal welfare": not mismatches,
        "runtime": elapsed < 60,
    }, f"{elapsed:.1f}s")


def test_ac09_mismatched_satisfaction():
    rows = run_sweep(SweepConfig(
        [Source("random", 1000, {"seed": 0})], rules=("greedy",), sat_fns=("cost",), rule_sat="card",
    ))
    tight = mismatch_tight(100, 2, 10, Fraction(1, 100), n=1000)
    ratio = _ratio(tight, "greedy")
    bound = tight.expected["bound"]
    _check(9, "mismatched-function greedy guarantee", {
        "sweep holds": all(r["ratio"] >= r["mismatch_bound"] and r["bound_holds"] for r in rows),
        "tight from above": ratio >= bound,
        "within 5%": ratio <= bound * Fraction(105, 100),
    }, f"ratio {float(ratio):.6f} vs bound {float(bound):.6f}")


def test_ac10_io(data_dir, example):
    def read(name):
        with open(os.path.join(data_dir, name), encoding="utf-8") as fh:
            return fh.read()

    parsed, _, warnings = parse_pabulib(read("running_example.pb"))
    native = read("running_example.pbi")
    _check(10, "Pabulib fixture, native round trip, golden CSV", {
        "pabulib": parsed == example and not warnings,
        "native round trip": emit_native(parse_native(native)) == native == emit_native(example),
        "golden csv": emit_report(run_sweep(GOLDEN_CONFIG)) == read("golden_report.csv"),
    })
