"""
Voting rules: Greedy, Method of Equal Shares (plain and greedy-completed)
and the welfare-maximizing MaxSat rule, plus the diagnostics used when
comparing MES against Greedy.

Ties are broken by ascending project id (plain string order) everywhere.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .core import Instance, lcm_of_denominators, supporters
from .satisfaction import SatisfactionFunction, project_value, project_welfare, utilitarian_welfare

__all__ = [
    "Outcome",
    "MesRound",
    "MesTrace",
    "Divergence",
    "MaxSatCapError",
    "INF",
    "compute_rho",
    "run_greedy",
    "run_mes",
    "run_mes_completed",
    "run_maxsat",
    "brute_force_maxsat",
    "truncated_greedy_welfare",
    "first_divergence_stage",
    "run_rule",
    "format_trace",
    "RULES",
]

INF = math.inf
DEFAULT_DP_CAP = 10**7
BRUTE_FORCE_LIMIT = 20
RULES = ("greedy", "mes", "mes-greedy", "maxsat")


class MaxSatCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class Outcome:
    selected: tuple[str, ...]
    total_cost: Fraction

    @classmethod
    def of(cls, instance: Instance, selected: Iterable[str]) -> "Outcome":
        selected = tuple(selected)
        return cls(selected, instance.total_cost(selected))

    def __contains__(self, project_id) -> bool:
        return project_id in self.selected

    def as_set(self) -> frozenset[str]:
        return frozenset(self.selected)


@dataclass(frozen=True)
class MesRound:
    project_id: str
    rho: Fraction
    payments: dict[int, Fraction]
    budgets_after: dict[int, Fraction]
    budget_limited: dict[str, frozenset[int]]
    """Affordable unchosen project -> supporters who could not pay an equal share."""
    candidate_rhos: dict[str, Fraction | float]

    @property
    def budget_limited_voters(self) -> frozenset[int]:
        return frozenset().union(*self.budget_limited.values()) if self.budget_limited else frozenset()


@dataclass(frozen=True)
class MesTrace:
    initial_budget_share: Fraction
    rounds: tuple[MesRound, ...]
    completion_start_index: int = field(default=-1)
    """Index into the outcome where greedy completion took over (-1 if not completed)."""


@dataclass(frozen=True)
class Divergence:
    stage: int
    project_id: str
    alpha: Fraction


def _id_key(pid: str) -> str:
    return pid


def compute_rho(
    project_cost: Fraction,
    sat: Fraction,
    remaining_budgets: Mapping[int, Fraction],
    project_supporters: Iterable[int],
) -> Fraction | float:
    """
    Smallest ``rho >= 0`` with ``sum_i min(b_i, rho * sat) == cost``.

    Supporters are visited by increasing budget; whoever cannot cover the
    current equal per-satisfaction price pays their whole budget and drops
    out. Returns ``math.inf`` when the supporters cannot afford the project.
    """
    budgets = sorted(remaining_budgets[i] for i in project_supporters)
    if sum(budgets, Fraction(0)) < project_cost:
        return INF
    paid = Fraction(0)
    remaining = len(budgets)
    for b_i in budgets:
        rho = (project_cost - paid) / (remaining * sat)
        if rho * sat <= b_i:
            return rho
        paid += b_i
        remaining -= 1
    raise AssertionError("unreachable: total budget covers the cost")


def _greedy_pick(instance, fn, candidates, spent):
    best = None
    best_value = None
    for pid in sorted(candidates, key=_id_key):
        if spent + instance.cost(pid) > instance.budget:
            continue
        value = project_value(fn, instance, pid)
        if best is None or value > best_value:
            best, best_value = pid, value
    return best, best_value


def run_greedy(
    instance: Instance,
    fn: SatisfactionFunction,
    start_state: tuple[Sequence[str], Fraction] | None = None,
) -> tuple[Outcome, list[tuple[str, Fraction]]]:
    """
    Repeatedly select the affordable unselected project with the highest
    value until nothing else fits.

    Parameters
    ----------
    start_state : (selected, spent), optional
        Already-selected projects and the budget they used; the rule then
        acts as a completion step.

    Returns
    -------
    (Outcome, list of (project id, value))
        The outcome (including any start projects) and the projects this
        run added, in selection order.
    """
    selected = list(start_state[0]) if start_state else []
    spent = Fraction(start_state[1]) if start_state else Fraction(0)
    remaining = set(instance.project_ids) - set(selected)
    order = []
    while True:
        pid, value = _greedy_pick(instance, fn, remaining, spent)
        if pid is None:
            break
        selected.append(pid)
        remaining.discard(pid)
        spent += instance.cost(pid)
        order.append((pid, value))
    return Outcome(tuple(selected), spent), order


def _budget_limited(instance, budgets, remaining, spent):
    limited = {}
    for pid in sorted(remaining, key=_id_key):
        cost = instance.cost(pid)
        if spent + cost > instance.budget:
            continue
        sup = supporters(instance, pid)
        if not sup:
            continue
        share = cost / len(sup)
        who = frozenset(i for i in sup if share > budgets[i])
        if who:
            limited[pid] = who
    return limited


def run_mes(instance: Instance, fn: SatisfactionFunction) -> tuple[Outcome, MesTrace]:
    """Method of Equal Shares without completion."""
    share = instance.budget / instance.n
    budgets = {i: share for i in instance.voters}
    remaining = set(instance.project_ids)
    selected: list[str] = []
    spent = Fraction(0)
    rounds = []
    while True:
        rhos = {}
        for pid in sorted(remaining, key=_id_key):
            rhos[pid] = compute_rho(
                instance.cost(pid), fn(instance.cost(pid)), budgets, supporters(instance, pid)
            )
        finite = [(rho, pid) for pid, rho in rhos.items() if rho != INF]
        if not finite:
            break
        limited = _budget_limited(instance, budgets, remaining, spent)
        rho, pid = min(finite, key=lambda t: (t[0], _id_key(t[1])))
        sat = fn(instance.cost(pid))
        payments = {i: min(budgets[i], rho * sat) for i in supporters(instance, pid)}
        for i, pay in payments.items():
            budgets[i] -= pay
        selected.append(pid)
        remaining.discard(pid)
        spent += instance.cost(pid)
        rounds.append(MesRound(pid, rho, payments, dict(budgets), limited, rhos))
    trace = MesTrace(share, tuple(rounds))
    return Outcome(tuple(selected), spent), trace


def run_mes_completed(instance: Instance, fn: SatisfactionFunction) -> tuple[Outcome, MesTrace]:
    """MES followed by Greedy on the leftover projects and budget."""
    mes_outcome, trace = run_mes(instance, fn)
    outcome, _ = run_greedy(instance, fn, (mes_outcome.selected, mes_outcome.total_cost))
    trace = MesTrace(trace.initial_budget_share, trace.rounds, len(mes_outcome.selected))
    return outcome, trace


# -- MaxSat -----------------------------------------------------------------

def _knapsack_items(instance, fn):
    ids = sorted(instance.project_ids, key=_id_key)
    scale = lcm_of_denominators([instance.budget] + [instance.cost(pid) for pid in ids])
    weights = [int(instance.cost(pid) * scale) for pid in ids]
    profits = [project_welfare(fn, instance, pid) for pid in ids]
    return ids, weights, profits, int(instance.budget * scale)


def _frontier_oracle(weights, profits, capacity):
    """Best profit of items ``i..`` within a capacity, via Pareto frontiers."""
    n = len(weights)
    frontiers = [None] * (n + 1)
    frontiers[n] = ([0], [Fraction(0)])
    for i in range(n - 1, -1, -1):
        ws, ps = frontiers[i + 1]
        merged = sorted(
            list(zip(ws, ps))
            + [(w + weights[i], p + profits[i]) for w, p in zip(ws, ps) if w + weights[i] <= capacity],
            key=lambda t: (t[0], -t[1]),
        )
        nw, np_ = [], []
        for w, p in merged:
            # sorted by weight, best profit first: keep strict improvements only
            if not np_ or p > np_[-1]:
                nw.append(w)
                np_.append(p)
        frontiers[i] = (nw, np_)

    def best(i, cap):
        ws, ps = frontiers[i]
        k = bisect.bisect_right(ws, cap)
        return ps[k - 1]

    return best


def _bnb_oracle(weights, profits):
    """Best profit of items ``i..`` within a capacity, via branch and bound."""
    n = len(weights)

    @lru_cache(maxsize=None)
    def best(i, cap):
        order = sorted(range(i, n), key=lambda j: -profits[j] / weights[j])
        incumbent = Fraction(0)

        def bound(pos, cap_left, acc):
            for j in order[pos:]:
                if weights[j] <= cap_left:
                    cap_left -= weights[j]
                    acc += profits[j]
                else:
                    return acc + profits[j] * Fraction(cap_left, weights[j])
            return acc

        def search(pos, cap_left, acc):
            nonlocal incumbent
            if acc > incumbent:
                incumbent = acc
            if pos == len(order) or bound(pos, cap_left, acc) <= incumbent:
                return
            j = order[pos]
            if weights[j] <= cap_left:
                search(pos + 1, cap_left - weights[j], acc + profits[j])
            search(pos + 1, cap_left, acc)

        search(0, cap, Fraction(0))
        return incumbent

    return best


def _lexicographic_optimum(ids, weights, profits, capacity, best):
    target = best(0, capacity)
    chosen = []
    cap = capacity
    for i, pid in enumerate(ids):
        if target == 0:
            break
        if weights[i] <= cap and profits[i] + best(i + 1, cap - weights[i]) == target:
            chosen.append(pid)
            cap -= weights[i]
            target -= profits[i]
    return chosen


def run_maxsat(
    instance: Instance,
    fn: SatisfactionFunction,
    dp_cap: int = DEFAULT_DP_CAP,
    allow_branch_and_bound: bool = True,
) -> Outcome:
    """
    A feasible outcome of maximum utilitarian welfare (exact 0/1 knapsack).

    Costs and budget are scaled to integers by the LCM of their
    denominators. Up to ``dp_cap`` scaled budget units a frontier dynamic
    program is used, above it branch and bound with the fractional
    relaxation as upper bound. Among optimal sets the lexicographically
    smallest sorted id list is returned.
    """
    ids, weights, profits, capacity = _knapsack_items(instance, fn)
    if capacity <= dp_cap:
        best = _frontier_oracle(weights, profits, capacity)
    elif allow_branch_and_bound:
        best = _bnb_oracle(weights, profits)
    else:
        raise MaxSatCapError(f"scaled budget {capacity} exceeds DP cap {dp_cap}")
    chosen = _lexicographic_optimum(ids, weights, profits, capacity, best)
    return Outcome.of(instance, chosen)


def brute_force_maxsat(instance: Instance, fn: SatisfactionFunction) -> Outcome:
    """Exhaustive-enumeration oracle for :func:`run_maxsat`."""
    ids = sorted(instance.project_ids, key=_id_key)
    if len(ids) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force supports at most {BRUTE_FORCE_LIMIT} projects, got {len(ids)}")
    best_key = None
    best_set = ()
    for r in range(len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            if instance.total_cost(combo) > instance.budget:
                continue
            uw = utilitarian_welfare(fn, instance, combo)
            key = (-uw, list(combo))
            if best_key is None or key < best_key:
                best_key, best_set = key, combo
    return Outcome.of(instance, best_set)


# -- diagnostics ------------------------------------------------------------

def truncated_greedy_welfare(instance: Instance, fn: SatisfactionFunction) -> Fraction:
    """
    Welfare Greedy collects with its first ``b - c_max`` units of spending.

    The project straddling that mark counts in proportion to the part of
    its cost that fits, keeping its value per unit cost unchanged.
    """
    c_max = max(p.cost for p in instance.projects)
    limit = instance.budget - c_max
    if limit <= 0:
        return Fraction(0)
    _, order = run_greedy(instance, fn)
    spent = Fraction(0)
    total = Fraction(0)
    for pid, value in order:
        cost = instance.cost(pid)
        if spent + cost <= limit:
            total += cost * value
            spent += cost
        else:
            total += (limit - spent) * value
            break
    return total


def first_divergence_stage(instance: Instance, fn: SatisfactionFunction) -> Divergence | None:
    """
    Replay Greedy's picks against MES budgets with equal cost splits and
    return the first stage where some supporter cannot pay an equal share.

    A pick nobody supports counts as a divergence with ``alpha = 0`` since
    MES can never fund it. Returns ``None`` if the rules agree throughout.
    """
    share = instance.budget / instance.n
    budgets = {i: share for i in instance.voters}
    _, order = run_greedy(instance, fn)
    for stage, (pid, _) in enumerate(order, start=1):
        cost = instance.cost(pid)
        sup = supporters(instance, pid)
        alpha = Fraction(len(sup)) * instance.budget / (instance.n * cost)
        if not sup:
            return Divergence(stage, pid, alpha)
        equal = cost / len(sup)
        if any(equal > budgets[i] for i in sup):
            return Divergence(stage, pid, alpha)
        for i in sup:
            budgets[i] -= equal
    return None


def run_rule(instance: Instance, fn: SatisfactionFunction, rule: str) -> tuple[Outcome, MesTrace | None]:
    if rule == "greedy":
        return run_greedy(instance, fn)[0], None
    if rule == "mes":
        return run_mes(instance, fn)
    if rule == "mes-greedy":
        return run_mes_completed(instance, fn)
    if rule == "maxsat":
        return run_maxsat(instance, fn), None
    raise ValueError(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}")


def format_trace(trace: MesTrace) -> str:
    """One line per MES round: ``project;rho;voter:payment,...``."""
    lines = []
    for rnd in trace.rounds:
        rho = "inf" if rnd.rho == INF else str(rnd.rho)
        pays = ",".join(f"{i}:{p}" for i, p in sorted(rnd.payments.items()))
        lines.append(f"{rnd.project_id};{rho};{pays}")
    return "\n".join(lines) + ("\n" if lines else "")
