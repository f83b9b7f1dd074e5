"""
Instance and report formats.

- ``.pb``: Pabulib files (read only, approval ballots only)
- ``.pbi``: native JSON instance documents with exact rational literals
- ``.csv``: sweep reports
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Mapping

from .core import Instance, InvalidInstanceError, format_rational, parse_rational, validate_instance

__all__ = [
    "PabulibError",
    "PabulibDocument",
    "read_pabulib_document",
    "parse_pabulib",
    "parse_native",
    "emit_native",
    "read_instance",
    "REPORT_COLUMNS",
    "RATIONAL_COLUMNS",
    "emit_report",
    "decimal12",
]


class PabulibError(ValueError):
    pass


@dataclass
class PabulibDocument:
    meta: dict[str, str]
    projects: list[dict[str, str]]
    votes: list[dict[str, str]]
    warnings: list[str] = field(default_factory=list)


_SECTIONS = ("META", "PROJECTS", "VOTES")


def _split_sections(text: str) -> dict[str, list[list[str]]]:
    sections: dict[str, list[list[str]]] = {}
    current = None
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.upper() in _SECTIONS and ";" not in stripped:
            current = stripped.upper()
            sections[current] = []
            continue
        if current is None:
            raise PabulibError(f"data before first section header: {stripped!r}")
        sections[current].append(next(csv.reader([stripped], delimiter=";")))
    for name in _SECTIONS:
        if name not in sections:
            raise PabulibError(f"missing section {name}")
        if not sections[name]:
            raise PabulibError(f"section {name} has no header row")
    return sections


def _rows(rows: list[list[str]]) -> list[dict[str, str]]:
    header = [h.strip() for h in rows[0]]
    return [dict(zip(header, (v.strip() for v in row))) for row in rows[1:]]


def _decimal(text: str, what: str) -> Fraction:
    try:
        return parse_rational(text.replace(",", "."))
    except InvalidInstanceError:
        raise PabulibError(f"unparseable {what}: {text!r}") from None


def read_pabulib_document(text: str) -> PabulibDocument:
    """Split a Pabulib file into its META mapping and PROJECTS/VOTES rows."""
    sections = _split_sections(text)
    meta = {row[0].strip(): row[1].strip() for row in sections["META"][1:] if len(row) >= 2}
    return PabulibDocument(meta, _rows(sections["PROJECTS"]), _rows(sections["VOTES"]))


def parse_pabulib(text: str) -> tuple[Instance, dict, list[str]]:
    """
    Parse a Pabulib approval file into an instance.

    Projects costing more than the budget are dropped, as are votes for
    unknown or dropped projects; each drop is reported in the returned
    warnings. Voters are numbered by row order.

    Returns
    -------
    (Instance, metadata, warnings)
        ``metadata`` holds the META mapping, the extra project columns
        keyed by project id and the original voter ids.
    """
    doc = read_pabulib_document(text)
    meta = doc.meta
    if "budget" not in meta:
        raise PabulibError("META lacks budget")
    vote_type = meta.get("vote_type", "")
    if vote_type != "approval":
        raise PabulibError(f"unsupported vote_type {vote_type!r}; only 'approval' is supported")
    budget = _decimal(meta["budget"], "budget")
    if budget <= 0:
        raise PabulibError(f"budget must be positive, got {budget}")

    projects = []
    extra = {}
    for row in doc.projects:
        pid = row.get("project_id")
        if pid is None or "cost" not in row:
            raise PabulibError("PROJECTS needs project_id and cost columns")
        projects.append({"id": pid, "cost": _decimal(row["cost"], f"cost of project {pid}")})
        extra[pid] = {k: v for k, v in row.items() if k not in ("project_id", "cost")}

    approvals = []
    voter_ids = []
    for row in doc.votes:
        voter_ids.append(row.get("voter_id", str(len(voter_ids) + 1)))
        vote = row.get("vote", "")
        approvals.append([v.strip() for v in vote.split(",") if v.strip()])

    instance = validate_instance(
        {"budget": budget, "projects": projects, "approvals": approvals},
        strict=False,
        warnings=doc.warnings,
    )
    metadata = {"meta": meta, "project_columns": extra, "voter_ids": voter_ids}
    return instance, metadata, doc.warnings


def emit_native(instance: Instance) -> str:
    """Canonical native document; ballots list ids in project order."""
    order = {pid: k for k, pid in enumerate(instance.project_ids)}
    doc = {
        "budget": format_rational(instance.budget),
        "projects": [{"id": p.id, "cost": format_rational(p.cost)} for p in instance.projects],
        "approvals": [sorted(ballot, key=order.__getitem__) for ballot in instance.approvals],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_native(text: str, strict: bool = True, warnings: list[str] | None = None) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"not a native instance document: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidInstanceError("native instance document must be an object")
    for key in ("budget", "projects", "approvals"):
        if key not in doc:
            raise InvalidInstanceError(f"missing field {key!r}")
    for entry in doc["projects"]:
        if not isinstance(entry, dict) or set(entry) != {"id", "cost"}:
            raise InvalidInstanceError(f"project entries need exactly 'id' and 'cost': {entry!r}")
        if not isinstance(entry["cost"], (str, int)):
            raise InvalidInstanceError(f"cost must be a rational literal string: {entry['cost']!r}")
    if not isinstance(doc["budget"], (str, int)):
        raise InvalidInstanceError(f"budget must be a rational literal string: {doc['budget']!r}")
    return validate_instance(doc, strict=strict, warnings=warnings)


def read_instance(path: str, strict: bool = True) -> tuple[Instance, list[str]]:
    """Load a ``.pb`` or ``.pbi`` file; ``.pb`` parsing is always lenient."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".pb"):
        instance, _, warnings = parse_pabulib(text)
        return instance, warnings
    warnings: list[str] = []
    return parse_native(text, strict=strict, warnings=warnings), warnings


REPORT_COLUMNS = (
    "instance_id",
    "n",
    "num_projects",
    "b",
    "c_min",
    "c_max",
    "k1",
    "k2",
    "sat_fn",
    "rule",
    "uw",
    "uw_opt",
    "ratio",
    "greedy_bound",
    "mes_bound_hi",
    "mismatch_bound",
    "ejr1_upper_bound",
    "bound_holds",
    "ejr1_satisfied",
)

RATIONAL_COLUMNS = (
    "b",
    "c_min",
    "c_max",
    "k1",
    "k2",
    "uw",
    "uw_opt",
    "ratio",
    "greedy_bound",
    "mes_bound_hi",
    "mismatch_bound",
    "ejr1_upper_bound",
)


def decimal12(value: Fraction) -> str:
    """Round half-even to 12 decimal places."""
    with localcontext() as ctx:
        ctx.prec = 60
        q = Decimal(value.numerator) / Decimal(value.denominator)
        text = f"{q.quantize(Decimal('1e-12'), rounding=ROUND_HALF_EVEN):f}"
    return text[1:] if text == "-0.000000000000" else text


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


def emit_report(records: Iterable[Mapping]) -> str:
    """
    CSV report: the columns of :data:`REPORT_COLUMNS` with rationals as
    exact literals, followed by a ``<column>_decimal`` companion for each
    rational column, and a final ``error`` column for failed rows.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS + tuple(f"{c}_decimal" for c in RATIONAL_COLUMNS) + ("error",))
    for rec in records:
        row = [_cell(rec.get(c)) for c in REPORT_COLUMNS]
        for c in RATIONAL_COLUMNS:
            v = rec.get(c)
            row.append(decimal12(v) if isinstance(v, Fraction) else "")
        row.append(rec.get("error", ""))
        writer.writerow(row)
    return buf.getvalue()
