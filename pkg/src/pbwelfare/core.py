"""
Exact data model for approval-based participatory budgeting instances.

All monetary quantities are :class:`fractions.Fraction` values. Voters are
numbered ``1..n``; project ids are free-form strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "InvalidInstanceError",
    "Project",
    "Instance",
    "InstanceParams",
    "parse_rational",
    "format_rational",
    "validate_instance",
    "supporters",
    "instance_params",
]


class InvalidInstanceError(ValueError):
    """Raised when raw instance data violates the PB model."""


def parse_rational(value) -> Fraction:
    """
    Parse an exact rational from an int, Fraction or literal string.

    Accepts ``"13/2"``, ``"12.50"``, ``"100"`` and ``"1e3"``; floats are
    rejected because they are not exact.
    """
    if isinstance(value, bool):
        raise InvalidInstanceError(f"not a rational literal: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        raise InvalidInstanceError(f"refusing inexact float {value!r}; pass a string literal")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidInstanceError(f"malformed rational literal: {value!r}") from None
    raise InvalidInstanceError(f"not a rational literal: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical literal: ``"13/2"`` or ``"100"``."""
    return str(Fraction(value))


@dataclass(frozen=True)
class Project:
    id: str
    cost: Fraction

    def __post_init__(self):
        if self.cost <= 0:
            raise InvalidInstanceError(f"project {self.id!r} has non-positive cost {self.cost}")


@dataclass(frozen=True)
class Instance:
    """
    A validated PB instance ``(P, A, b, c)``.

    Parameters
    ----------
    budget : Fraction
        The budget limit ``b``.
    projects : tuple of Project
        Projects in their declared order.
    approvals : tuple of frozenset of str
        ``approvals[i - 1]`` is the approval set of voter ``i``.
    """

    budget: Fraction
    projects: tuple[Project, ...]
    approvals: tuple[frozenset[str], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _supporters: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {p.id: p for p in self.projects}
        sup: dict[str, list[int]] = {p.id: [] for p in self.projects}
        for voter, ballot in enumerate(self.approvals, start=1):
            for pid in ballot:
                sup[pid].append(voter)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_supporters", {k: tuple(v) for k, v in sup.items()})

    @property
    def voter_count(self) -> int:
        return len(self.approvals)

    @property
    def n(self) -> int:
        return len(self.approvals)

    @property
    def voters(self) -> range:
        return range(1, len(self.approvals) + 1)

    @property
    def project_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.projects)

    def project(self, project_id: str) -> Project:
        try:
            return self._index[project_id]
        except KeyError:
            raise KeyError(f"unknown project id {project_id!r}") from None

    def cost(self, project_id: str) -> Fraction:
        return self.project(project_id).cost

    def total_cost(self, project_ids: Iterable[str]) -> Fraction:
        return sum((self.cost(pid) for pid in project_ids), Fraction(0))

    def ballot(self, voter: int) -> frozenset[str]:
        if not 1 <= voter <= len(self.approvals):
            raise KeyError(f"unknown voter {voter}")
        return self.approvals[voter - 1]


@dataclass(frozen=True)
class InstanceParams:
    c_min: Fraction
    c_max: Fraction
    k1: Fraction
    k2: Fraction
    mu_min: Fraction
    mu_max: Fraction


def validate_instance(
    raw: Mapping,
    *,
    strict: bool = True,
    warnings: list[str] | None = None,
) -> Instance:
    """
    Build an :class:`Instance` from raw data.

    ``raw`` must provide ``budget``, ``projects`` (a sequence of
    ``{"id", "cost"}`` mappings or ``(id, cost)`` pairs) and ``approvals``
    (one iterable of project ids per voter).

    In strict mode a project costing more than the budget is an error. In
    lenient mode such projects, and every approval that refers to them, are
    dropped and a message is appended to ``warnings``.
    """
    for key in ("budget", "projects", "approvals"):
        if key not in raw:
            raise InvalidInstanceError(f"missing field {key!r}")
    budget = parse_rational(raw["budget"])
    if budget <= 0:
        raise InvalidInstanceError(f"budget must be positive, got {budget}")

    projects: list[Project] = []
    seen: set[str] = set()
    dropped: dict[str, Fraction] = {}
    for entry in raw["projects"]:
        if isinstance(entry, Mapping):
            pid, cost = entry["id"], entry["cost"]
        else:
            pid, cost = entry
        pid = str(pid)
        if pid in seen:
            raise InvalidInstanceError(f"duplicate project id {pid!r}")
        seen.add(pid)
        cost = parse_rational(cost)
        if cost <= 0:
            raise InvalidInstanceError(f"project {pid!r} has non-positive cost {cost}")
        if cost > budget:
            if strict:
                raise InvalidInstanceError(
                    f"project {pid!r} costs {cost}, more than the budget {budget}"
                )
            dropped[pid] = cost
            continue
        projects.append(Project(pid, cost))

    approvals: list[frozenset[str]] = []
    lost = dict.fromkeys(dropped, 0)
    for voter, ballot in enumerate(raw["approvals"], start=1):
        ids = [str(pid) for pid in ballot]
        kept = []
        for pid in ids:
            if pid in dropped:
                lost[pid] += 1
                continue
            if pid not in seen:
                if strict:
                    raise InvalidInstanceError(f"voter {voter} approves unknown project {pid!r}")
                if warnings is not None:
                    warnings.append(f"voter {voter}: removed approval of unknown project {pid!r}")
                continue
            kept.append(pid)
        approvals.append(frozenset(kept))
    if not approvals:
        raise InvalidInstanceError("instance has zero voters")
    if warnings is not None:
        for pid, cost in dropped.items():
            warnings.append(
                f"dropped project {pid!r}: cost {cost} exceeds budget {budget}"
                f" ({lost[pid]} approval(s) removed)"
            )
    return Instance(budget, tuple(projects), tuple(approvals))


def supporters(instance: Instance, project_id: str) -> tuple[int, ...]:
    """Voters approving ``project_id``, in ascending order."""
    instance.project(project_id)
    return instance._supporters[project_id]


def instance_params(instance: Instance, fn) -> InstanceParams:
    """Cost range, committee-size bounds ``k1 <= k2`` and satisfaction range."""
    from .satisfaction import sat_value

    if not instance.projects:
        raise InvalidInstanceError("instance has no projects")
    costs = [p.cost for p in instance.projects]
    sats = [sat_value(fn, p) for p in instance.projects]
    c_min, c_max = min(costs), max(costs)
    b = instance.budget
    return InstanceParams(c_min, c_max, b / c_max, b / c_min, min(sats), max(sats))


def lcm_of_denominators(values: Sequence[Fraction]) -> int:
    return math.lcm(*(Fraction(v).denominator for v in values)) if values else 1
