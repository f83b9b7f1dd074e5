import os

import pytest

from pbwelfare import validate_instance

DATA = os.path.join(os.path.dirname(__file__), "data")

RUNNING_COSTS = {"p1": "65", "p2": "60", "p3": "40", "p4": "20", "p5": "20"}
RUNNING_SUPPORT = {
    "p1": {1, 2, 3, 4, 5, 6},
    "p2": {1, 2, 3, 4, 5},
    "p3": {1, 2, 3, 7},
    "p4": {6, 7, 8},
    "p5": {9, 10},
}


def running_example_raw():
    return {
        "budget": "100",
        "projects": [{"id": pid, "cost": c} for pid, c in RUNNING_COSTS.items()],
        "approvals": [[p for p in RUNNING_COSTS if v in RUNNING_SUPPORT[p]] for v in range(1, 11)],
    }


@pytest.fixture
def example():
    return validate_instance(running_example_raw())


@pytest.fixture
def data_dir():
    return DATA


_ACCEPTANCE_LINES = []


def record_acceptance(number: int, title: str, passed: bool, detail: str = ""):
    line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
