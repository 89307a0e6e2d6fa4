"""Deterministic report structures and their serializations.

A report bundle carries the scenario's tables, pass/fail verdicts, a
constants block, and enough provenance (config digest, seed, toolkit
version) to reproduce it.  Serialization is deterministic: no timestamps,
fixed key order, repr-exact floats in JSON (lossless round-trip) and
17-significant-digit scientific notation in CSV.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

CSV_FLOAT_FORMAT = ".17e"
HUMAN_SIG_DIGITS = 6


@dataclass(frozen=True)
class Table:
    """A named rectangular table; cells are numbers or strings."""

    name: str
    columns: list[str]
    rows: list[list]

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"table {self.name!r} row {i} has {len(row)} cells "
                    f"for {len(self.columns)} columns"
                )


@dataclass(frozen=True)
class Verdict:
    """One named pass/fail check with a human-readable detail line."""

    name: str
    passed: bool
    detail: str = ""


@dataclass
class ReportBundle:
    """Everything one scenario run produced."""

    scenario: str
    toolkit_version: str
    config_sha256: str
    seed: int
    constants: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    tables: list[Table] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 2


def _csv_cell(value) -> str:
    if hasattr(value, "item") and not isinstance(value, (bool, int, float, str)):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, CSV_FLOAT_FORMAT)
    return str(value)


def _json_default(value):
    item = getattr(value, "item", None)
    if callable(item):
        return item()
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def bundle_to_json_text(bundle: ReportBundle) -> str:
    """Canonical JSON serialization; byte-identical for identical inputs."""
    payload = {
        "toolkit": {"name": "obskit", "version": bundle.toolkit_version},
        "scenario": bundle.scenario,
        "seed": bundle.seed,
        "config_sha256": bundle.config_sha256,
        "constants": bundle.constants,
        "notes": bundle.notes,
        "verdicts": [
            {"name": v.name, "passed": v.passed, "detail": v.detail} for v in bundle.verdicts
        ],
        "tables": {
            t.name: {"columns": t.columns, "rows": t.rows} for t in bundle.tables
        },
    }
    return (
        json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False, default=_json_default)
        + "\n"
    )


def table_to_csv_text(table: Table) -> str:
    """CSV with a header row, '.' decimal separator, '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buffer.getvalue()


def bundle_to_csv_texts(bundle: ReportBundle) -> dict[str, str]:
    """All tables plus verdicts and constants, each as one CSV document."""
    out = {table.name: table_to_csv_text(table) for table in bundle.tables}
    out["verdicts"] = table_to_csv_text(
        Table(
            name="verdicts",
            columns=["name", "passed", "detail"],
            rows=[[v.name, v.passed, v.detail] for v in bundle.verdicts],
        )
    )
    out["constants"] = table_to_csv_text(
        Table(
            name="constants",
            columns=["name", "value"],
            rows=[[key, value] for key, value in bundle.constants.items()],
        )
    )
    return out


def _human_number(value) -> str:
    if isinstance(value, float):
        return format(value, f".{HUMAN_SIG_DIGITS}g")
    return str(value)


def bundle_summary_text(bundle: ReportBundle) -> str:
    """Short human summary: verdict lines plus headline constants (6 digits)."""
    lines = [f"scenario: {bundle.scenario}   seed: {bundle.seed}"]
    for key, value in bundle.constants.items():
        if isinstance(value, (int, float)):
            lines.append(f"  {key} = {_human_number(value)}")
    for note in bundle.notes:
        lines.append(f"  note: {note}")
    for v in bundle.verdicts:
        status = "PASS" if v.passed else "FAIL"
        detail = f" — {v.detail}" if v.detail else ""
        lines.append(f"{status} {v.name}{detail}")
    lines.append("all verdicts passed" if bundle.all_passed else "SOME VERDICTS FAILED")
    return "\n".join(lines) + "\n"
