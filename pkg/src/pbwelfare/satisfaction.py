"""
Additive, cost-neutral satisfaction functions and welfare computations.

A satisfaction function maps a project cost to a positive satisfaction;
voters only gain satisfaction from projects they approve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .core import Instance, Project, parse_rational, supporters

__all__ = [
    "SatisfactionFunction",
    "DnsReport",
    "SatisfactionError",
    "cost_sat",
    "cardinality_sat",
    "sqrt_sat",
    "table_sat",
    "parse_sat_name",
    "sat_value",
    "voter_sat",
    "utilitarian_welfare",
    "project_welfare",
    "project_value",
    "check_dns",
]

KINDS = ("cost", "cardinality", "sqrt_cost", "table")


class SatisfactionError(ValueError):
    pass


@dataclass(frozen=True)
class SatisfactionFunction:
    kind: str
    table: Mapping[Fraction, Fraction] | None = field(default=None, hash=False)
    sqrt_precision: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SatisfactionError(f"unknown satisfaction kind {self.kind!r}")
        if self.kind == "table":
            if not self.table:
                raise SatisfactionError("table satisfaction needs a non-empty table")
            for cost, sat in self.table.items():
                if sat <= 0:
                    raise SatisfactionError(f"satisfaction for cost {cost} must be positive")
        if self.kind == "sqrt_cost" and (self.sqrt_precision is None or self.sqrt_precision < 1):
            raise SatisfactionError("sqrt_cost needs a positive integer precision")

    @property
    def name(self) -> str:
        return {"cost": "cost", "cardinality": "card", "sqrt_cost": "sqrt", "table": "table"}[
            self.kind
        ]

    def __call__(self, cost: Fraction) -> Fraction:
        cost = Fraction(cost)
        if self.kind == "cost":
            return cost
        if self.kind == "cardinality":
            return Fraction(1)
        if self.kind == "sqrt_cost":
            d = self.sqrt_precision
            # floor(sqrt(cost) * d) == isqrt(floor(cost * d^2))
            scaled = cost.numerator * d * d // cost.denominator
            value = Fraction(math.isqrt(scaled), d)
            if value <= 0:
                raise SatisfactionError(f"sqrt precision {d} too coarse for cost {cost}")
            return value
        try:
            return self.table[cost]
        except KeyError:
            raise SatisfactionError(f"satisfaction table has no entry for cost {cost}") from None


@dataclass(frozen=True)
class DnsReport:
    is_dns: bool
    violating_pair: tuple[Fraction, Fraction, int] | None = None
    """``(cost_a, cost_b, condition)`` with ``cost_a < cost_b``; condition is 1 or 2."""


def cost_sat() -> SatisfactionFunction:
    return SatisfactionFunction("cost")


def cardinality_sat() -> SatisfactionFunction:
    return SatisfactionFunction("cardinality")


def sqrt_sat(precision: int = 10**6, instance: Instance | None = None) -> SatisfactionFunction:
    """
    Round-down rational approximation of ``sqrt(cost)``.

    If ``instance`` is given, the rounded function is checked to still be
    DNS on that instance's costs, and :class:`SatisfactionError` is raised
    otherwise.
    """
    fn = SatisfactionFunction("sqrt_cost", sqrt_precision=precision)
    if instance is not None:
        report = check_dns(fn, instance)
        if not report.is_dns:
            a, b, cond = report.violating_pair
            raise SatisfactionError(
                f"sqrt rounding at precision {precision} breaks DNS condition ({cond}) "
                f"for costs {a} and {b}"
            )
    return fn


def table_sat(table: Mapping) -> SatisfactionFunction:
    return SatisfactionFunction(
        "table", table={parse_rational(k): parse_rational(v) for k, v in table.items()}
    )


def read_table(text: str) -> SatisfactionFunction:
    """Parse ``cost;satisfaction`` records, one per line."""
    table = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(";")
        if len(parts) != 2:
            raise SatisfactionError(f"line {lineno}: expected 'cost;satisfaction'")
        table[parse_rational(parts[0])] = parse_rational(parts[1])
    return table_sat(table)


def parse_sat_name(name: str, precision: int = 10**6) -> SatisfactionFunction:
    """Resolve a CLI name: ``cost``, ``card``, ``sqrt`` or ``table:<path>``."""
    if name == "cost":
        return cost_sat()
    if name in ("card", "cardinality"):
        return cardinality_sat()
    if name == "sqrt":
        return sqrt_sat(precision)
    if name.startswith("table:"):
        with open(name[len("table:"):], encoding="utf-8") as fh:
            return read_table(fh.read())
    raise SatisfactionError(f"unknown satisfaction function {name!r}")


def sat_value(fn: SatisfactionFunction, project: Project | Fraction) -> Fraction:
    cost = project.cost if isinstance(project, Project) else project
    return fn(cost)


def voter_sat(fn: SatisfactionFunction, instance: Instance, voter: int, outcome: Iterable[str]) -> Fraction:
    ballot = instance.ballot(voter)
    return sum((fn(instance.cost(pid)) for pid in outcome if pid in ballot), Fraction(0))


def project_welfare(fn: SatisfactionFunction, instance: Instance, project_id: str) -> Fraction:
    return len(supporters(instance, project_id)) * fn(instance.cost(project_id))


def utilitarian_welfare(fn: SatisfactionFunction, instance: Instance, outcome: Iterable[str]) -> Fraction:
    """Total satisfaction ``sum_p |N_p| * mu(p)`` over ``outcome``."""
    return sum((project_welfare(fn, instance, pid) for pid in outcome), Fraction(0))


def project_value(fn: SatisfactionFunction, instance: Instance, project_id: str) -> Fraction:
    """Welfare per unit cost."""
    return project_welfare(fn, instance, project_id) / instance.cost(project_id)


def check_dns(fn: SatisfactionFunction, instance: Instance) -> DnsReport:
    """
    Check both DNS conditions over the distinct costs of ``instance``.

    For costs ``a < b`` this requires ``mu(a) <= mu(b)`` and
    ``mu(a)/a >= mu(b)/b``. Only consecutive costs need comparing since
    both conditions are transitive; the first violation is reported.
    """
    costs = sorted({p.cost for p in instance.projects})
    sats = [fn(c) for c in costs]
    for i in range(len(costs) - 1):
        a, b = costs[i], costs[i + 1]
        if sats[i] > sats[i + 1]:
            return DnsReport(False, (a, b, 1))
        if sats[i] / a < sats[i + 1] / b:
            return DnsReport(False, (a, b, 2))
    return DnsReport(True)
