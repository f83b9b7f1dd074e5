"""Regenerate the golden files under tests/data (run by hand after reviewing a diff)."""

import os

from pbwelfare.formats import emit_native, emit_report, parse_pabulib
from pbwelfare.sweep import Source, SweepConfig, run_sweep

DATA = os.path.join(os.path.dirname(__file__), "data")

GOLDEN_CONFIG = SweepConfig(
    sources=[
        Source("file", os.path.join(DATA, "running_example.pbi")),
        Source("construction", "ejr1_tight", {"b": "100", "k1": ["3", "4"], "k2": "25"}),
        Source("construction", "bounded_sat_worstcase", {"n": "5"}),
        Source("random", 3, {"seed": 11}),
    ],
    rules=("greedy", "mes-greedy", "maxsat"),
    checks=("bounds", "ejr1", "oracle"),
)


def main():
    with open(os.path.join(DATA, "running_example.pb"), encoding="utf-8") as fh:
        instance, _, _ = parse_pabulib(fh.read())
    with open(os.path.join(DATA, "running_example.pbi"), "w", encoding="utf-8") as fh:
        fh.write(emit_native(instance))
    with open(os.path.join(DATA, "golden_report.csv"), "w", encoding="utf-8") as fh:
        fh.write(emit_report(run_sweep(GOLDEN_CONFIG)))


if __name__ == "__main__":
    main()
