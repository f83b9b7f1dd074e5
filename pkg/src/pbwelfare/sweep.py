"""
Batch evaluation: run rules over instance sources and check every
applicable welfare bound on every row.
"""

from __future__ import annotations

import glob
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .axioms import EJR1_PROJECT_LIMIT, check_ejr1
from .core import Instance, instance_params
from .formats import read_instance
from .generators import Construction, ConstructionSpec, gen_random, generate
from .guarantees import guarantee_bounds
from .rules import (
    RULES,
    brute_force_maxsat,
    run_greedy,
    run_maxsat,
    run_mes_completed,
    run_rule,
    truncated_greedy_welfare,
)
from .satisfaction import (
    SatisfactionError,
    SatisfactionFunction,
    check_dns,
    parse_sat_name,
    project_value,
    sqrt_sat,
    utilitarian_welfare,
)

__all__ = ["Source", "SweepConfig", "ConfigError", "run_sweep", "evaluate", "exit_code", "ORACLE_PROJECT_LIMIT"]

CHECKS = ("bounds", "ejr1", "oracle")
ORACLE_PROJECT_LIMIT = 15


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Source:
    """
    One instance source.

    ``kind`` is ``"file"`` (``target`` is a path or glob), ``"construction"``
    (``target`` is the construction kind, ``grid`` maps parameter names to
    candidate values) or ``"random"`` (``target`` is the number of
    instances, ``grid`` may hold ``seed`` and generator ranges).
    """

    kind: str
    target: str | int
    grid: dict = field(default_factory=dict, hash=False)


@dataclass
class SweepConfig:
    sources: list[Source]
    rules: Sequence[str] = ("greedy", "mes-greedy", "maxsat")
    sat_fns: Sequence[str] | None = None
    rule_sat: str | None = None
    checks: Sequence[str] = ("bounds",)
    jobs: int = 1
    strict: bool = True
    sqrt_precision: int = 10**6

    def validate(self):
        if not self.sources:
            raise ConfigError("sweep needs at least one instance source")
        if not self.rules:
            raise ConfigError("sweep needs at least one rule")
        if self.sat_fns is not None and not self.sat_fns:
            raise ConfigError("sweep needs at least one satisfaction function")
        for rule in self.rules:
            if rule not in RULES:
                raise ConfigError(f"unknown rule {rule!r}")
        for check in self.checks:
            if check not in CHECKS:
                raise ConfigError(f"unknown check {check!r}")


def _grid(params: dict) -> list[dict]:
    keys = sorted(params)
    values = [v if isinstance(v, (list, tuple)) else [v] for v in (params[k] for k in keys)]
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def _expand(config: SweepConfig) -> list[tuple[str, Instance | None, Construction | None, str | None]]:
    """(instance id, instance, construction, load error) in deterministic order."""
    items = []
    for src in config.sources:
        if src.kind == "file":
            paths = sorted(glob.glob(str(src.target))) or [str(src.target)]
            for path in paths:
                try:
                    inst, _ = read_instance(path, strict=config.strict)
                    items.append((os.path.basename(path), inst, None, None))
                except (OSError, ValueError) as exc:
                    items.append((os.path.basename(path), None, None, str(exc)))
        elif src.kind == "construction":
            for params in _grid(src.grid):
                label = ",".join(f"{k}={params[k]}" for k in sorted(params))
                iid = f"{src.target}({label})"
                try:
                    con = generate(ConstructionSpec(str(src.target), params))
                    items.append((iid, con.instance, con, None))
                except ValueError as exc:
                    items.append((iid, None, None, str(exc)))
        elif src.kind == "random":
            grid = dict(src.grid)
            seed0 = int(grid.pop("seed", 0))
            n_range = (int(grid.get("n_min", 1)), int(grid.get("n_max", 12)))
            p_range = (int(grid.get("p_min", 1)), int(grid.get("p_max", 10)))
            den = int(grid.get("den", 4))
            for k in range(int(src.target)):
                seed = seed0 + k
                items.append((f"random:{seed}", gen_random(seed, n_range, p_range, den), None, None))
        else:
            raise ConfigError(f"unknown source kind {src.kind!r}")
    return items


def _resolve_fn(name: str, instance: Instance, precision: int) -> SatisfactionFunction:
    if name == "sqrt":
        return sqrt_sat(precision, instance)
    return parse_sat_name(name, precision)


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    return Fraction(1) if den == 0 else num / den


def evaluate(
    instance_id: str,
    instance: Instance,
    fn: SatisfactionFunction,
    rule_fn: SatisfactionFunction,
    rules: Sequence[str],
    checks: Sequence[str],
    sat_label: str | None = None,
) -> list[dict]:
    """One report record per rule for a single (instance, function pair)."""
    params = instance_params(instance, fn)
    b = instance.budget
    bounds = guarantee_bounds(b, params.c_min, params.c_max)
    fn_dns = check_dns(fn, instance).is_dns
    same = rule_fn == fn
    rule_dns = fn_dns if same else check_dns(rule_fn, instance).is_dns
    opt = run_maxsat(instance, fn)
    uw_opt = utilitarian_welfare(fn, instance, opt.selected)
    label = sat_label or (fn.name if same else f"{fn.name}/{rule_fn.name}")
    base = {
        "instance_id": instance_id,
        "n": instance.n,
        "num_projects": len(instance.projects),
        "b": b,
        "c_min": params.c_min,
        "c_max": params.c_max,
        "k1": params.k1,
        "k2": params.k2,
        "sat_fn": label,
        "uw_opt": uw_opt,
        "greedy_bound": bounds.greedy_bound,
        "mes_bound_hi": bounds.mes_bound.hi,
        "mismatch_bound": bounds.mismatch_bound,
        "ejr1_upper_bound": bounds.ejr1_upper_bound,
    }
    records = []
    for rule in rules:
        outcome, trace = run_rule(instance, rule_fn, rule)
        uw = utilitarian_welfare(fn, instance, outcome.selected)
        ratio = _ratio(uw, uw_opt)
        holds = None
        if "bounds" in checks:
            holds = _bound_holds(instance, fn, rule, outcome, trace, ratio, bounds, params, same, fn_dns, rule_dns)
        if "oracle" in checks and rule == "maxsat" and same and len(instance.projects) <= ORACLE_PROJECT_LIMIT:
            oracle_ok = utilitarian_welfare(fn, instance, brute_force_maxsat(instance, fn).selected) == uw_opt
            holds = oracle_ok if holds is None else (holds and oracle_ok)
        ejr1 = None
        if "ejr1" in checks:
            if len(instance.projects) > EJR1_PROJECT_LIMIT:
                ejr1 = "skipped"
            else:
                ejr1 = check_ejr1(instance, rule_fn, outcome.selected).satisfied
        records.append(dict(base, rule=rule, uw=uw, ratio=ratio, bound_holds=holds, ejr1_satisfied=ejr1,
                            selected=outcome.selected))
    return records


def _bound_holds(instance, fn, rule, outcome, trace, ratio, bounds, params, same, fn_dns, rule_dns):
    b = instance.budget
    if rule == "greedy":
        if same:
            return ratio >= bounds.greedy_bound
        if fn_dns and rule_dns:
            return ratio >= bounds.mismatch_bound
        return None
    if rule == "maxsat":
        return ratio == 1 if same else None
    if rule == "mes-greedy" and same and fn_dns:
        hi = bounds.mes_bound.hi
        uw_mes = utilitarian_welfare(fn, instance, outcome.selected)
        uw_greedy = utilitarian_welfare(fn, instance, run_greedy(instance, fn)[0].selected)
        ok = ratio >= hi and _ratio(uw_mes, uw_greedy) >= hi
        if params.c_max < b:
            truncated = truncated_greedy_welfare(instance, fn)
            ok = ok and _ratio(uw_mes, truncated) >= bounds.mes_bound.scale(b / (b - params.c_max)).hi
        floor_value = instance.n * params.mu_min / b
        mes_phase = outcome.selected[: trace.completion_start_index]
        ok = ok and all(project_value(fn, instance, pid) >= floor_value for pid in mes_phase)
        return ok
    return None


def _task(args):
    instance_id, instance, construction, error, sat_fns, rule_sat, rules, checks, precision = args
    if error is not None:
        return [{"instance_id": instance_id, "error": error}]
    pairs = []
    try:
        if sat_fns is None and construction is not None:
            pairs.append((construction.fn, construction.rule_fn))
        else:
            for name in sat_fns or ("cost",):
                fn = _resolve_fn(name, instance, precision)
                rule_fn = _resolve_fn(rule_sat, instance, precision) if rule_sat else fn
                pairs.append((fn, rule_fn))
    except (SatisfactionError, OSError) as exc:
        return [{"instance_id": instance_id, "error": str(exc)}]
    records = []
    for fn, rule_fn in pairs:
        try:
            records.extend(evaluate(instance_id, instance, fn, rule_fn, rules, checks))
        except (SatisfactionError, ValueError, ArithmeticError) as exc:
            records.append({"instance_id": instance_id, "sat_fn": fn.name, "error": str(exc)})
    return records


def run_sweep(config: SweepConfig) -> list[dict]:
    """
    Evaluate every (instance, satisfaction function, rule) combination.

    Records come back in source order regardless of ``config.jobs``.
    Failures on a single instance become records with an ``error`` key.
    """
    config.validate()
    items = _expand(config)
    tasks = [
        (iid, inst, con, err, config.sat_fns, config.rule_sat, tuple(config.rules), tuple(config.checks),
         config.sqrt_precision)
        for iid, inst, con, err in items
    ]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs))))
    else:
        chunks = [_task(t) for t in tasks]
    return [rec for chunk in chunks for rec in chunk]


def exit_code(records: Iterable[dict]) -> int:
    """3 if any bound fails, else 2 if any row errored, else 0."""
    records = list(records)
    if any(r.get("bound_holds") is False for r in records):
        return 3
    if any("error" in r for r in records):
        return 2
    return 0
