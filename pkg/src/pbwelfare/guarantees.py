"""
Closed-form utilitarian guarantees and the empirical ratios they bound.

Square roots are represented by certified rational brackets so that every
"bound holds" verdict is sound: a ratio is only declared to satisfy a
lower bound if it is at least the bracket's upper end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Instance, instance_params
from .rules import (
    Divergence,
    first_divergence_stage,
    run_greedy,
    run_maxsat,
    run_mes_completed,
    truncated_greedy_welfare,
)
from .satisfaction import SatisfactionFunction, check_dns, project_value, utilitarian_welfare

__all__ = [
    "Interval",
    "GuaranteeReport",
    "ComparativeReport",
    "sqrt_interval",
    "floor_sqrt",
    "guarantee_bounds",
    "utilitarian_ratio",
    "comparative_mes_vs_greedy",
    "certify_instance",
]

ROOT_PRECISION = 10**12


@dataclass(frozen=True)
class Interval:
    """Closed rational interval ``[lo, hi]`` containing a real number."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    def __sub__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        return Interval(self.lo - other, self.hi - other)

    def scale(self, factor: Fraction) -> "Interval":
        if factor < 0:
            return Interval(self.hi * factor, self.lo * factor)
        return Interval(self.lo * factor, self.hi * factor)

    def clamp(self, floor: Fraction = Fraction(0)) -> "Interval":
        return Interval(max(floor, self.lo), max(floor, self.hi))


def floor_sqrt(q: Fraction) -> int:
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    return math.isqrt(q.numerator // q.denominator)


def sqrt_interval(q: Fraction, precision: int = ROOT_PRECISION) -> Interval:
    """Bracket ``sqrt(q)``; the bracket is a point when ``q`` is a rational square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Interval(Fraction(rn, rd), Fraction(rn, rd))
    lo = Fraction(math.isqrt(q.numerator * precision * precision // q.denominator), precision)
    return Interval(lo, lo + Fraction(1, precision))


@dataclass(frozen=True)
class GuaranteeReport:
    b: Fraction
    c_min: Fraction
    c_max: Fraction
    k1: Fraction
    k2: Fraction
    greedy_bound: Fraction
    mes_bound: Interval
    mismatch_bound: Fraction
    ejr1_upper_bound: Fraction
    x: Fraction

    @property
    def greedy_bound_clamped(self) -> Fraction:
        return max(Fraction(0), self.greedy_bound)

    @property
    def mes_bound_clamped(self) -> Interval:
        return self.mes_bound.clamp()

    @property
    def mismatch_bound_clamped(self) -> Fraction:
        return max(Fraction(0), self.mismatch_bound)

    @property
    def ejr1_upper_bound_clamped(self) -> Fraction:
        return max(Fraction(0), self.ejr1_upper_bound)


def guarantee_bounds(b, c_min, c_max) -> GuaranteeReport:
    """
    Evaluate all four bounds for budget ``b`` and cost range ``[c_min, c_max]``.

    - greedy: ``(b - c_max) / b``
    - MES (completed by greedy): ``2 sqrt(c_min/b) - (c_min + c_max)/b``
    - greedy run with a different DNS function: ``(b - c_max)/b * c_min/c_max``
    - upper bound for any EJR1 rule under cost satisfaction:
      ``2/floor(sqrt(b/c_min)) - (c_min + x c_max)/b``

    Examples
    --------
    >>> guarantee_bounds(10**6, 10**4, 3 * 10**4).mes_bound.lo
    Fraction(4, 25)
    """
    b, c_min, c_max = Fraction(b), Fraction(c_min), Fraction(c_max)
    if not 0 < c_min <= c_max <= b:
        raise ValueError(f"need 0 < c_min <= c_max <= b, got {c_min}, {c_max}, {b}")
    k1, k2 = b / c_max, b / c_min
    greedy = (b - c_max) / b
    mes = sqrt_interval(c_min / b).scale(Fraction(2)) - (c_min + c_max) / b
    mismatch = greedy * c_min / c_max
    r = floor_sqrt(k2)
    y = r * c_min / c_max
    x = y - math.floor(y)
    ejr1 = Fraction(2, r) - (c_min + x * c_max) / b
    return GuaranteeReport(b, c_min, c_max, k1, k2, greedy, mes, mismatch, ejr1, x)


def utilitarian_ratio(
    instance: Instance,
    fn: SatisfactionFunction,
    outcome,
    optimum_welfare: Fraction | None = None,
) -> Fraction:
    """Welfare of ``outcome`` relative to MaxSat; 1 when the optimum is 0."""
    selected = outcome.selected if hasattr(outcome, "selected") else outcome
    if optimum_welfare is None:
        optimum_welfare = utilitarian_welfare(fn, instance, run_maxsat(instance, fn).selected)
    if optimum_welfare == 0:
        return Fraction(1)
    return utilitarian_welfare(fn, instance, selected) / optimum_welfare


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    return Fraction(1) if den == 0 else num / den


@dataclass(frozen=True)
class ComparativeReport:
    ratio: Fraction
    bound: Interval
    holds: bool
    divergence: Divergence | None
    truncated_ratio: Fraction | None
    truncated_bound: Interval | None
    truncated_holds: bool | None


def comparative_mes_vs_greedy(instance: Instance, fn: SatisfactionFunction) -> ComparativeReport:
    """
    Compare MES completed by Greedy against Greedy itself, and against
    Greedy truncated to its first ``b - c_max`` units of spending.
    """
    report = check_dns(fn, instance)
    if not report.is_dns:
        raise ValueError(f"satisfaction function is not DNS on this instance: {report.violating_pair}")
    params = instance_params(instance, fn)
    bounds = guarantee_bounds(instance.budget, params.c_min, params.c_max)
    uw_mes = utilitarian_welfare(fn, instance, run_mes_completed(instance, fn)[0].selected)
    uw_greedy = utilitarian_welfare(fn, instance, run_greedy(instance, fn)[0].selected)
    ratio = _ratio(uw_mes, uw_greedy)
    t_ratio = t_bound = t_holds = None
    b = instance.budget
    if params.c_max < b:
        t_ratio = _ratio(uw_mes, truncated_greedy_welfare(instance, fn))
        t_bound = bounds.mes_bound.scale(b / (b - params.c_max))
        t_holds = t_ratio >= t_bound.hi
    return ComparativeReport(
        ratio,
        bounds.mes_bound,
        ratio >= bounds.mes_bound.hi,
        first_divergence_stage(instance, fn),
        t_ratio,
        t_bound,
        t_holds,
    )


def certify_instance(instance: Instance, fn: SatisfactionFunction, rule_fn: SatisfactionFunction | None = None) -> dict:
    """
    Evaluate every welfare inequality that applies to ``instance``.

    Returns a mapping from check name to ``True``/``False``, or ``None``
    when the check's hypotheses do not hold (e.g. a non-DNS function).
    Welfare is always measured with ``fn``; ``rule_fn`` (default ``fn``)
    drives the Greedy run for the mismatched-function check.
    """
    rule_fn = rule_fn or fn
    params = instance_params(instance, fn)
    b = instance.budget
    bounds = guarantee_bounds(b, params.c_min, params.c_max)
    dns = check_dns(fn, instance).is_dns
    uw_opt = utilitarian_welfare(fn, instance, run_maxsat(instance, fn).selected)
    greedy = run_greedy(instance, fn)[0]
    uw_greedy = utilitarian_welfare(fn, instance, greedy.selected)
    checks: dict[str, bool | None] = {}
    checks["greedy_vs_optimum"] = _ratio(uw_greedy, uw_opt) >= bounds.greedy_bound

    if dns:
        mes_outcome, trace = run_mes_completed(instance, fn)
        uw_mes = utilitarian_welfare(fn, instance, mes_outcome.selected)
        hi = bounds.mes_bound.hi
        checks["mes_vs_greedy"] = _ratio(uw_mes, uw_greedy) >= hi
        checks["mes_vs_optimum"] = _ratio(uw_mes, uw_opt) >= hi
        if params.c_max < b:
            scaled = bounds.mes_bound.scale(b / (b - params.c_max)).hi
            checks["mes_vs_truncated_greedy"] = (
                _ratio(uw_mes, truncated_greedy_welfare(instance, fn)) >= scaled
            )
        else:
            checks["mes_vs_truncated_greedy"] = None
        floor_value = instance.n * params.mu_min / b
        checks["mes_min_value"] = all(
            project_value(fn, instance, pid) >= floor_value
            for pid in mes_outcome.selected[: trace.completion_start_index]
        )
    else:
        for name in ("mes_vs_greedy", "mes_vs_optimum", "mes_vs_truncated_greedy", "mes_min_value"):
            checks[name] = None

    if rule_fn != fn and dns and check_dns(rule_fn, instance).is_dns:
        mismatched = run_greedy(instance, rule_fn)[0]
        checks["mismatched_greedy_vs_optimum"] = (
            _ratio(utilitarian_welfare(fn, instance, mismatched.selected), uw_opt)
            >= bounds.mismatch_bound
        )
    else:
        checks["mismatched_greedy_vs_optimum"] = None
    return checks
