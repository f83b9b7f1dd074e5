"""
Builders for adversarial and tight PB instances, plus seeded random ones.

Every builder returns a :class:`Construction`: the instance, the
satisfaction function welfare is measured with, the function the rules
should run with, and an ``expected`` record describing the outcome the
construction is designed to force.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .core import Instance, InvalidInstanceError, parse_rational, validate_instance
from .guarantees import floor_sqrt, guarantee_bounds
from .satisfaction import SatisfactionFunction, cardinality_sat, cost_sat, parse_sat_name, table_sat

__all__ = [
    "KINDS",
    "ConstructionSpec",
    "Construction",
    "ConstructionError",
    "generate",
    "gen_random",
    "bounded_sat_worstcase",
    "vanishing_sat_worstcase",
    "non_dns_worstcase",
    "greedy_tight",
    "ejr1_tight",
    "mismatch_tight",
    "multiwinner",
    "smallest_n_eps",
]

KINDS = (
    "bounded_sat_worstcase",
    "vanishing_sat_worstcase",
    "non_dns_worstcase",
    "greedy_tight",
    "ejr1_tight",
    "mismatch_tight",
    "multiwinner",
    "random",
)


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionSpec:
    kind: str
    parameters: Mapping[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Construction:
    instance: Instance
    fn: SatisfactionFunction
    rule_fn: SatisfactionFunction
    expected: dict


def _ids(prefix: str, count: int) -> list[str]:
    width = len(str(count))
    return [f"{prefix}{j:0{width}d}" for j in range(1, count + 1)]


def _build(budget, projects, approvals) -> Instance:
    raw = {
        "budget": budget,
        "projects": [(pid, cost) for pid, cost in projects],
        "approvals": approvals,
    }
    return validate_instance(raw, strict=True)


def _approvals_from_supporters(n: int, support: Mapping[str, range | list[int]]) -> list[list[str]]:
    ballots: list[list[str]] = [[] for _ in range(n)]
    for pid, voters in support.items():
        for i in voters:
            ballots[i - 1].append(pid)
    return ballots


def _require(cond: bool, message: str):
    if not cond:
        raise ConstructionError(message)


def bounded_sat_worstcase(n: int = 10, b=100, eps=Fraction(9, 10), fn: SatisfactionFunction | None = None) -> Construction:
    """
    One voter's tiny project blocks a budget-sized project everyone else
    wants; for functions bounded below by ``eps`` the ratio is at most
    ``1/(n-1)``.
    """
    fn = fn or cardinality_sat()
    b, eps = Fraction(b), Fraction(eps)
    _require(n >= 3, "need n >= 3")
    mu_big = fn(b)
    _require(0 < eps < mu_big, f"need 0 < eps < mu(b) = {mu_big}")
    small_cost = eps * b / (n * mu_big)
    _require(fn(small_cost) > eps, "satisfaction must exceed eps on every project")
    support = {"p1": range(2, n + 1), "p2": [1]}
    inst = _build(b, [("p1", b), ("p2", small_cost)], _approvals_from_supporters(n, support))
    ratio = fn(small_cost) / ((n - 1) * mu_big)
    expected = {
        "selected": {"greedy": ["p2"], "mes-greedy": ["p2"], "maxsat": ["p1"]},
        "ratio": ratio,
        "ratio_upper": Fraction(1, n - 1),
    }
    return Construction(inst, fn, fn, expected)


def vanishing_sat_worstcase(n: int = 10, b=100, delta=Fraction(1, 1000)) -> Construction:
    """
    Under cost satisfaction, a project of cost ``b*delta/n`` backed by all
    but one voter crowds out a budget-sized project; ratio ``(n-1)delta/n``.
    """
    b, delta = Fraction(b), Fraction(delta)
    _require(n >= 3, "need n >= 3")
    _require(0 < delta < 1, "need 0 < delta < 1")
    small_cost = b * delta / n
    support = {"p1": [1], "p2": range(2, n + 1)}
    inst = _build(b, [("p1", b), ("p2", small_cost)], _approvals_from_supporters(n, support))
    expected = {
        "selected": {"greedy": ["p2"], "mes-greedy": ["p2"], "maxsat": ["p1"]},
        "ratio": (n - 1) * small_cost / b,
        "ratio_strict_upper": delta,
    }
    return Construction(inst, cost_sat(), cost_sat(), expected)


def non_dns_worstcase(b=100, k1=2, k2=5, eps=Fraction(1, 1000), n: int | None = None) -> Construction:
    """
    Cheap projects for all voters but one get satisfaction ``eps``, one
    expensive project for voter 1 gets ``n**2``; any EJR1 rule must fund
    the cheap ones and ends with ratio at most ``eps``.
    """
    b, eps = Fraction(b), Fraction(eps)
    k1, k2 = Fraction(k1), Fraction(k2)
    _require(1 <= k1 < k2, "need 1 <= k1 < k2")
    _require(eps > 0, "need eps > 0")
    c_max, c_min = b / k1, b / k2
    n_min = max(3, math.ceil(b / (c_max - c_min)), math.ceil(k2))
    if n is None:
        n = n_min
    _require(n >= b / (c_max - c_min), f"need n >= b/(c_max - c_min) = {b / (c_max - c_min)}")
    k = math.floor(b * (n - 1) / (n * c_min))
    # uw(cheap set) = k(n-1)eps must not exceed n**2 * eps
    _require(k * (n - 1) <= n * n, f"n = {n} too small: cheap welfare exceeds n^2 * eps")
    _require(k * c_min > b - c_max, "cheap projects do not exhaust the budget")
    cheap = _ids("c", k)
    support = {pid: range(2, n + 1) for pid in cheap}
    support["x"] = [1]
    projects = [(pid, c_min) for pid in cheap] + [("x", c_max)]
    inst = _build(b, projects, _approvals_from_supporters(n, support))
    fn = table_sat({c_min: eps, c_max: Fraction(n * n)})
    expected = {
        "selected": {"mes-greedy": cheap},
        "ratio_upper": eps,
        "is_dns": False,
        "k": k,
        "n": n,
    }
    return Construction(inst, fn, fn, expected)


def greedy_tight(x: int = 10, n: int = 1000, eps=Fraction(1, 100), b=100) -> Construction:
    """
    ``x - 1`` slightly oversized projects everyone approves versus ``x``
    budget-filling ones all but voter 1 approve; Greedy takes the former.
    """
    b, eps = Fraction(b), Fraction(eps)
    _require(x >= 2 and n >= 2, "need x >= 2 and n >= 2")
    _require(0 < eps <= Fraction(1, x - 1), "need 0 < eps <= 1/(x-1)")
    big_cost = (1 + eps) * b / x
    small_cost = b / x
    big, small = _ids("a", x - 1), _ids("b", x)
    support = {pid: range(1, n + 1) for pid in big}
    support.update({pid: range(2, n + 1) for pid in small})
    projects = [(pid, big_cost) for pid in big] + [(pid, small_cost) for pid in small]
    inst = _build(b, projects, _approvals_from_supporters(n, support))
    ratio = Fraction(n, n - 1) * (1 + eps - big_cost / b)
    _require(ratio < 1, "parameters leave Greedy optimal")
    expected = {
        "selected": {"greedy": big, "maxsat": small},
        "ratio": ratio,
        "limit": (b - big_cost) / b,
    }
    return Construction(inst, cost_sat(), cost_sat(), expected)


def ejr1_tight(b=100, k1: int = 4, k2: int = 25) -> Construction:
    """
    ``n = k2`` voters; ``k1`` projects of cost ``b/k1`` shared by the first
    ``floor(sqrt(n))`` voters, and one project of cost ``b/k2`` for each
    remaining voter alone.
    """
    b = Fraction(b)
    _require(int(k1) == k1 and int(k2) == k2, "k1 and k2 must be integers")
    k1, k2 = int(k1), int(k2)
    _require(1 <= k1 <= k2, "need 1 <= k1 <= k2")
    n = k2
    r = math.isqrt(n)
    big = _ids("b", k1)
    singles = [f"s{j:0{len(str(n))}d}" for j in range(r + 1, n + 1)]
    support = {pid: range(1, r + 1) for pid in big}
    support.update({pid: [j] for pid, j in zip(singles, range(r + 1, n + 1))})
    projects = [(pid, b / k1) for pid in big] + [(pid, b / k2) for pid in singles]
    inst = _build(b, projects, _approvals_from_supporters(n, support))
    bounds = guarantee_bounds(b, b / k2, b / k1)
    expected = {
        "selected": {"maxsat": big},
        "uw_opt": r * b,
        "ratio_upper": bounds.ejr1_upper_bound,
        "x": bounds.x,
    }
    return Construction(inst, cost_sat(), cost_sat(), expected)


def smallest_n_eps(r: Fraction, eps: Fraction) -> int:
    """
    Smallest ``n`` with ``n*r`` non-integral and ``ceil(n*r) <= (n + eps) * r``.

    With ``r = p/q`` in lowest terms the rounding gap ``ceil(n*r) - n*r`` is
    ``j/q`` for ``n*p = -j (mod q)``, so a solution exists iff ``q > 1`` and
    ``eps*p >= 1``, and one always appears among ``n = 1..q``.
    """
    r, eps = Fraction(r), Fraction(eps)
    if r.denominator == 1 or eps * r.numerator < 1:
        raise ConstructionError(f"no n satisfies the rounding condition for r = {r}, eps = {eps}")
    for n in range(1, r.denominator + 1):
        nr = n * r
        if nr.denominator != 1 and math.ceil(nr) <= (n + eps) * r:
            return n
    raise AssertionError("unreachable")


def mismatch_tight(b=100, k1: int = 2, k2: int = 10, eps=Fraction(1, 100), n: int | None = None) -> Construction:
    """
    Greedy run with cardinality satisfaction while welfare is measured by
    cost: ``k2`` cheap projects with just enough supporters to look better
    per unit cost crowd out ``k1`` expensive projects everyone approves.
    """
    b, eps = Fraction(b), Fraction(eps)
    _require(int(k1) == k1 and int(k2) == k2, "k1 and k2 must be integers")
    k1, k2 = int(k1), int(k2)
    _require(1 <= k1 < k2, "need 1 <= k1 < k2")
    c_max = b / k1
    _require(0 < eps < c_max, "need 0 < eps < c_max")
    c_min = (b - c_max + eps) / k2
    _require(c_min <= c_max, "c_min exceeds c_max; increase k2")
    r = c_min / c_max
    if n is None:
        n = smallest_n_eps(r, eps)
    _require(n >= 1, "need n >= 1")
    _require((n * r).denominator != 1, "n * c_min / c_max must not be an integer")
    m = math.ceil(n * r)
    _require(m <= n, "cheap projects need more supporters than voters")
    expensive, cheap = _ids("e", k1), _ids("c", k2)
    support = {pid: range(1, n + 1) for pid in expensive}
    support.update({pid: range(1, m + 1) for pid in cheap})
    projects = [(pid, c_max) for pid in expensive] + [(pid, c_min) for pid in cheap]
    inst = _build(b, projects, _approvals_from_supporters(n, support))
    bound = guarantee_bounds(b, c_min, c_max).mismatch_bound
    expected = {
        "selected": {"greedy": cheap, "maxsat": expensive},
        "ratio": (b - c_max + eps) * m / (b * n),
        "n": n,
        "n_eps_condition": m <= (n + eps) * r,
        "ratio_upper": (n + eps) / n * (b - c_max + eps) / b * r,
        "bound": bound,
    }
    return Construction(inst, cost_sat(), cardinality_sat(), expected)


def multiwinner(k: int = 4, c=25, n: int = 2, num_projects: int | None = None, seed: int | None = None) -> Construction:
    """Equal-cost instance with ``b = k*c``; unanimous unless ``seed`` is given."""
    c = Fraction(c)
    _require(k >= 1 and n >= 1, "need k >= 1 and n >= 1")
    m = num_projects or 2 * k
    ids = _ids("p", m)
    if seed is None:
        ballots = [list(ids) for _ in range(n)]
    else:
        rng = random.Random(seed)
        ballots = [[pid for pid in ids if rng.random() < 0.5] for _ in range(n)]
    inst = _build(k * c, [(pid, c) for pid in ids], ballots)
    expected = {"k": k, "unanimous": seed is None}
    return Construction(inst, cost_sat(), cost_sat(), expected)


def gen_random(
    seed: int,
    n_range: tuple[int, int] = (1, 12),
    p_range: tuple[int, int] = (1, 10),
    cost_denominator_bound: int = 4,
    budget_range: tuple[int, int] = (10, 100),
) -> Instance:
    """
    Reproducible random instance.

    Costs are ``a/d`` with ``d <= cost_denominator_bound`` and never exceed
    the integer budget; each voter approves each project independently with
    probability 1/2, so empty ballots occur.
    """
    if n_range[0] < 1 or n_range[0] > n_range[1] or p_range[0] < 1 or p_range[0] > p_range[1]:
        raise ValueError("ranges must be nonempty and positive")
    if cost_denominator_bound < 1:
        raise ValueError("cost_denominator_bound must be >= 1")
    rng = random.Random(seed)
    n = rng.randint(*n_range)
    m = rng.randint(*p_range)
    budget = rng.randint(*budget_range)
    ids = _ids("p", m)
    projects = []
    for pid in ids:
        d = rng.randint(1, cost_denominator_bound)
        projects.append((pid, Fraction(rng.randint(1, budget * d), d)))
    ballots = [[pid for pid in ids if rng.random() < 0.5] for _ in range(n)]
    return _build(budget, projects, ballots)


_INT_PARAMS = {"n", "k", "k1", "k2", "x", "seed", "num_projects", "n_min", "n_max", "p_min", "p_max", "den"}


def _coerce(params: Mapping[str, Any]) -> dict:
    out = {}
    for key, value in params.items():
        if key in ("sat", "fn"):
            out["fn"] = parse_sat_name(value) if isinstance(value, str) else value
            continue
        if key in _INT_PARAMS:
            value = parse_rational(value)
            if value.denominator != 1:
                raise ConstructionError(f"parameter {key} must be an integer")
            out[key] = int(value)
        else:
            out[key] = parse_rational(value)
    return out


def generate(spec: ConstructionSpec) -> Construction:
    """Dispatch on ``spec.kind`` with its (string or numeric) parameters."""
    params = _coerce(spec.parameters)
    if spec.kind == "random":
        seed = params.get("seed", 0)
        inst = gen_random(
            seed,
            (params.get("n_min", 1), params.get("n_max", 12)),
            (params.get("p_min", 1), params.get("p_max", 10)),
            params.get("den", 4),
        )
        return Construction(inst, cost_sat(), cost_sat(), {"seed": seed})
    builders = {
        "bounded_sat_worstcase": bounded_sat_worstcase,
        "vanishing_sat_worstcase": vanishing_sat_worstcase,
        "non_dns_worstcase": non_dns_worstcase,
        "greedy_tight": greedy_tight,
        "ejr1_tight": ejr1_tight,
        "mismatch_tight": mismatch_tight,
        "multiwinner": multiwinner,
    }
    if spec.kind not in builders:
        raise ConstructionError(f"unknown construction {spec.kind!r}")
    try:
        return builders[spec.kind](**params)
    except TypeError as exc:
        raise ConstructionError(f"bad parameters for {spec.kind}: {exc}") from None
    except InvalidInstanceError as exc:
        raise ConstructionError(str(exc)) from None
