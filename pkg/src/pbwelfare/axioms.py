"""
Cohesive groups and Extended Justified Representation up to one project.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Instance, supporters
from .satisfaction import SatisfactionFunction, voter_sat

__all__ = ["Ejr1Witness", "Ejr1Result", "is_cohesive", "check_ejr1", "EJR1_PROJECT_LIMIT"]

EJR1_PROJECT_LIMIT = 20


@dataclass(frozen=True)
class Ejr1Witness:
    T: tuple[str, ...]
    group: tuple[int, ...]
    group_threshold: Fraction
    """``n * c(T) / b``, the smallest group size that can be T-cohesive."""


@dataclass(frozen=True)
class Ejr1Result:
    satisfied: bool
    witness: Ejr1Witness | None = None


def is_cohesive(instance: Instance, T: Iterable[str], group: Iterable[int]) -> bool:
    """True iff every member approves all of ``T`` and ``c(T) <= |group| * b / n``."""
    T = frozenset(T)
    group = frozenset(group)
    if not T or not group:
        raise ValueError("T and group must be nonempty")
    for pid in T:
        instance.project(pid)
    if any(not T <= instance.ballot(i) for i in group):
        return False
    return instance.total_cost(T) * instance.n <= len(group) * instance.budget


def _best_reachable(fn, instance, voter, outcome, sat_outcome):
    """Highest satisfaction the voter reaches by adding one unchosen approved project."""
    gains = [fn(instance.cost(pid)) for pid in instance.ballot(voter) - outcome]
    return sat_outcome + max(gains) if gains else None


def check_ejr1(
    instance: Instance,
    fn: SatisfactionFunction,
    outcome: Iterable[str],
    max_projects: int | None = EJR1_PROJECT_LIMIT,
) -> Ejr1Result:
    """
    Exhaustively check EJR1 for ``outcome``.

    For each affordable ``T`` not contained in the outcome, collect the
    common supporters of ``T`` who have no project that would lift them
    above ``mu(T)``. Any cohesive group violating the axiom consists of
    such voters, and any large enough set of them is cohesive, so a
    violation exists iff this pool reaches ``n * c(T) / b`` voters.

    Candidate sets are grown one project at a time. Extending ``T`` only
    shrinks its common supporters and raises the size threshold, so a set
    with too few common supporters is never extended.

    Parameters
    ----------
    max_projects : int or None
        Refuse instances with more projects than this; ``None`` disables
        the cap (the search is exponential in the worst case).

    Returns
    -------
    Ejr1Result
        On violation, the witness has the smallest ``T`` in (size, sorted
        ids) order and the first ``ceil(n * c(T) / b)`` voters of its pool.
    """
    outcome = frozenset(outcome)
    ids = sorted(instance.project_ids)
    if max_projects is not None and len(ids) > max_projects:
        raise ValueError(f"EJR1 check supports at most {max_projects} projects, got {len(ids)}")
    n, b = instance.n, instance.budget
    reach = {
        i: _best_reachable(fn, instance, i, outcome, voter_sat(fn, instance, i, outcome))
        for i in instance.voters
    }
    position = {pid: k for k, pid in enumerate(ids)}

    # each level holds (T, c(T), common supporters) with enough supporters
    level = []
    for pid in ids:
        cost = instance.cost(pid)
        common = frozenset(supporters(instance, pid))
        if cost <= b and len(common) * b >= n * cost:
            level.append(((pid,), cost, common))
    while level:
        for T, cost_T, common in level:
            if outcome.issuperset(T):
                continue
            threshold = n * cost_T / b
            sat_T = sum((fn(instance.cost(pid)) for pid in T), Fraction(0))
            # voters with a witness project can reach more than mu(T)
            pool = sorted(i for i in common if reach[i] is None or reach[i] <= sat_T)
            if len(pool) >= threshold:
                size_needed = max(1, math.ceil(threshold))
                return Ejr1Result(False, Ejr1Witness(T, tuple(pool[:size_needed]), threshold))
        nxt = []
        for T, cost_T, common in level:
            for pid in ids[position[T[-1]] + 1:]:
                cost = cost_T + instance.cost(pid)
                if cost > b:
                    continue
                shared = common & frozenset(supporters(instance, pid))
                if len(shared) * b >= n * cost:
                    nxt.append((T + (pid,), cost, shared))
        level = nxt
    return Ejr1Result(True)
