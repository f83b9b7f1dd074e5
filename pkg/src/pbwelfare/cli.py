"""Command-line interface: ``pbwelfare <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .axioms import check_ejr1
from .core import InvalidInstanceError, instance_params, parse_rational
from .formats import emit_native, emit_report, read_instance
from .generators import KINDS, ConstructionError, ConstructionSpec, generate
from .guarantees import guarantee_bounds, utilitarian_ratio
from .rules import RULES, format_trace, run_rule
from .satisfaction import SatisfactionError, parse_sat_name, sqrt_sat, utilitarian_welfare
from .sweep import CHECKS, ConfigError, Source, SweepConfig, exit_code, run_sweep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FALSIFIED = 3


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    return value


def _emit(record: dict, out=None):
    text = json.dumps(_jsonable(record), indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_params(pairs):
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        values = value.split(",")
        params[key.strip()] = values if len(values) > 1 else values[0]
    return params


def _load(args):
    instance, warnings = read_instance(args.instance, strict=args.strict)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return instance


def _fns(args, instance):
    def resolve(name):
        return sqrt_sat(args.sqrt_precision, instance) if name == "sqrt" else parse_sat_name(name)

    fn = resolve(args.sat)
    rule_fn = resolve(args.rule_sat) if args.rule_sat else fn
    return fn, rule_fn


def cmd_solve(args):
    instance = _load(args)
    fn, rule_fn = _fns(args, instance)
    outcome, trace = run_rule(instance, rule_fn, args.rule)
    record = {
        "rule": args.rule,
        "selected": list(outcome.selected),
        "total_cost": outcome.total_cost,
        "uw": utilitarian_welfare(fn, instance, outcome.selected),
    }
    if trace is not None:
        record["completion_start_index"] = trace.completion_start_index
        record["trace"] = format_trace(trace).splitlines()
    _emit(record, args.out)
    return EXIT_OK


def cmd_ratio(args):
    instance = _load(args)
    fn, rule_fn = _fns(args, instance)
    outcome, _ = run_rule(instance, rule_fn, args.rule)
    params = instance_params(instance, fn)
    bounds = guarantee_bounds(instance.budget, params.c_min, params.c_max)
    _emit(
        {
            "rule": args.rule,
            "selected": list(outcome.selected),
            "uw": utilitarian_welfare(fn, instance, outcome.selected),
            "ratio": utilitarian_ratio(instance, fn, outcome),
            "greedy_bound": bounds.greedy_bound,
            "mes_bound_hi": bounds.mes_bound.hi,
            "mismatch_bound": bounds.mismatch_bound,
        },
        args.out,
    )
    return EXIT_OK


def cmd_bounds(args):
    if args.instance:
        instance = _load(args)
        params = instance_params(instance, parse_sat_name("cost"))
        b, c_min, c_max = instance.budget, params.c_min, params.c_max
    else:
        if args.b is None or args.c_min is None or args.c_max is None:
            raise ConfigError("bounds needs --instance or all of --b, --c-min, --c-max")
        b, c_min, c_max = (parse_rational(v) for v in (args.b, args.c_min, args.c_max))
    rep = guarantee_bounds(b, c_min, c_max)
    _emit(
        {
            "b": rep.b,
            "c_min": rep.c_min,
            "c_max": rep.c_max,
            "k1": rep.k1,
            "k2": rep.k2,
            "greedy_bound": rep.greedy_bound,
            "mes_bound_lo": rep.mes_bound.lo,
            "mes_bound_hi": rep.mes_bound.hi,
            "mes_bound_exact": rep.mes_bound.exact,
            "mismatch_bound": rep.mismatch_bound,
            "ejr1_upper_bound": rep.ejr1_upper_bound,
            "x": rep.x,
        },
        args.out,
    )
    return EXIT_OK


def cmd_check_ejr1(args):
    instance = _load(args)
    fn, rule_fn = _fns(args, instance)
    if args.outcome is not None:
        selected = [s for s in args.outcome.split(",") if s]
    else:
        selected = list(run_rule(instance, rule_fn, args.rule)[0].selected)
    result = check_ejr1(instance, fn, selected)
    record = {"outcome": selected, "satisfied": result.satisfied}
    if result.witness:
        record["witness"] = {
            "T": list(result.witness.T),
            "group": list(result.witness.group),
            "group_threshold": result.witness.group_threshold,
        }
    _emit(record, args.out)
    return EXIT_OK


def cmd_generate(args):
    con = generate(ConstructionSpec(args.construction, _parse_params(args.param)))
    text = emit_native(con.instance)
    expected = dict(con.expected, sat_fn=con.fn.name, rule_sat_fn=con.rule_fn.name)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit(expected, args.out + ".expected.json")
    else:
        sys.stdout.write(text)
        _emit(expected)
    return EXIT_OK


def cmd_sweep(args):
    sources = [Source("file", path) for path in args.instance or []]
    if args.construction:
        sources.append(Source("construction", args.construction, _parse_params(args.param)))
    if args.random:
        sources.append(Source("random", args.random, {"seed": args.seed}))
    config = SweepConfig(
        sources=sources,
        rules=args.rule or ("greedy", "mes-greedy", "maxsat"),
        sat_fns=args.sat,
        rule_sat=args.rule_sat,
        checks=args.check or ("bounds",),
        jobs=args.jobs,
        strict=args.strict,
        sqrt_precision=args.sqrt_precision,
    )
    records = run_sweep(config)
    text = emit_report(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code(records)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbwelfare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance_required=True, single_sat=True):
        p.add_argument("--instance", required=instance_required, help=".pb or .pbi file")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--strict", dest="strict", action="store_true", default=True)
        mode.add_argument("--lenient", dest="strict", action="store_false")
        if single_sat:
            p.add_argument("--sat", default="cost", help="cost | card | sqrt | table:<path>")
            p.add_argument("--rule-sat", default=None, help="satisfaction the rule runs with")
        p.add_argument("--sqrt-precision", type=int, default=10**6)
        p.add_argument("--out", default=None)

    p = sub.add_parser("solve", help="run one rule on one instance")
    common(p)
    p.add_argument("--rule", choices=RULES, default="mes-greedy")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ratio", help="utilitarian ratio of a rule against MaxSat")
    common(p)
    p.add_argument("--rule", choices=RULES, default="mes-greedy")
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("bounds", help="closed-form guarantees")
    common(p, instance_required=False, single_sat=False)
    p.add_argument("--b")
    p.add_argument("--c-min")
    p.add_argument("--c-max")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("check-ejr1", help="check EJR up to one project")
    common(p)
    p.add_argument("--rule", choices=RULES, default="mes-greedy")
    p.add_argument("--outcome", default=None, help="comma-separated project ids (overrides --rule)")
    p.set_defaults(func=cmd_check_ejr1)

    p = sub.add_parser("generate", help="build a named construction")
    p.add_argument("--construction", required=True, choices=KINDS)
    p.add_argument("--param", action="append", help="key=value")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="batch evaluation to CSV")
    p.add_argument("--instance", action="append", help="file or glob; repeatable")
    p.add_argument("--construction", choices=KINDS)
    p.add_argument("--param", action="append", help="key=v1,v2,... grid; repeatable")
    p.add_argument("--random", type=int, default=0, help="number of seeded random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sat", action="append", help="repeatable; defaults to the construction's or cost")
    p.add_argument("--rule-sat", default=None)
    p.add_argument("--rule", action="append", choices=RULES)
    p.add_argument("--check", action="append", choices=CHECKS)
    p.add_argument("--jobs", type=int, default=1)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True)
    mode.add_argument("--lenient", dest="strict", action="store_false")
    p.add_argument("--sqrt-precision", type=int, default=10**6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInstanceError, SatisfactionError, ConstructionError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
