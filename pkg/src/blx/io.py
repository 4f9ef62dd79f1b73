"""CSV ingestion and run-report emission.

Input files are comma-separated UTF-8 text.  The value column may be picked
by header name or 0-based index; loaded series are indexed t = 1, 2, ... in
file order.  Empty or unparseable cells are hard errors — silently dropping
rows would silently shift the time axis.

A :class:`RunReport` serializes to a single JSON document whose keys appear
in a fixed order and whose floats use the shortest round-tripping decimal
form, so ``parse_report(emit_report(r)) == r.to_dict()`` holds exactly.  The
``csv`` format instead emits long-form ``series,t,value`` rows for plotting.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass, field

from .core import Series
from .errors import MissingColumn, NonNumericCell, SeriesTooShort
from .harness import ComparisonReport, ResidualReport

__all__ = [
    "ColumnSpec",
    "RunReport",
    "load_series_csv",
    "load_table",
    "emit_report",
    "parse_report",
    "numeric_content",
]

_PACKAGE_NAME = "blx"
_PACKAGE_VERSION = "0.1.0"


@dataclass(frozen=True)
class ColumnSpec:
    """Which CSV column holds the values, and how the file is shaped.

    ``column`` is a header name (implies the first row is a header) or a
    0-based index.  ``skip_header`` only matters for index columns.  An
    optional ``date_column`` is carried through to reports as text; it never
    enters the math.
    """

    column: int | str = 0
    skip_header: bool = False
    date_column: int | str | None = None


def _resolve(header: list[str], column: int | str) -> int:
    if isinstance(column, str):
        try:
            return header.index(column)
        except ValueError:
            raise MissingColumn(
                f"column {column!r} not found in header {header}"
            ) from None
    if column < 0 or (header and column >= len(header)):
        raise MissingColumn(f"column index {column} out of range")
    return column


def load_table(
    path, spec: ColumnSpec
) -> tuple[Series, list[str] | None]:
    """Load the value column (and optional date column) from a CSV file.

    Returns the values as a :class:`Series` starting at t = 1 plus the date
    strings, or ``None`` when no date column was requested.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    needs_header = isinstance(spec.column, str) or isinstance(
        spec.date_column, str
    )
    if not rows or (needs_header and len(rows) < 2):
        raise SeriesTooShort(f"{path}: no data rows")
    if needs_header or spec.skip_header:
        header, data_rows = rows[0], rows[1:]
    else:
        header, data_rows = rows[0], rows
    col = _resolve(header, spec.column)
    date_col = (
        _resolve(header, spec.date_column)
        if spec.date_column is not None
        else None
    )
    values = []
    dates = [] if date_col is not None else None
    for rownum, row in enumerate(data_rows, start=1):
        cell = row[col].strip() if col < len(row) else ""
        try:
            values.append(float(cell))
        except ValueError:
            raise NonNumericCell(rownum, spec.column, cell) from None
        if dates is not None:
            dates.append(row[date_col].strip() if date_col < len(row) else "")
    if not values:
        raise SeriesTooShort(f"{path}: no data rows")
    return Series(1, values), dates


def load_series_csv(path, spec: ColumnSpec) -> Series:
    """Load just the value column; see :func:`load_table`."""
    return load_table(path, spec)[0]


@dataclass(eq=False)
class RunReport:
    """Everything one command run produced, ready to serialize.

    ``config`` echoes every parameter needed to regenerate the numeric
    content; ``elapsed_seconds`` is the only field excluded from
    reproducibility comparisons.
    """

    command: str
    config: dict
    reports: tuple = ()
    comparison: ComparisonReport | None = None
    series: dict = field(default_factory=dict)
    aggregate: dict | None = None
    dates: list | None = None
    elapsed_seconds: float = 0.0

    def to_dict(self) -> dict:
        """Plain-data form with a fixed key order at every level."""
        doc = {
            "artifact": {
                "name": _PACKAGE_NAME,
                "version": _PACKAGE_VERSION,
            },
            "command": self.command,
            "config": self.config,
            "reports": [_report_dict(r) for r in self.reports],
            "comparison": (
                _comparison_dict(self.comparison) if self.comparison else None
            ),
            "series": {
                name: {
                    "start_t": s.start_t,
                    "values": [float(v) for v in s.values],
                }
                for name, s in self.series.items()
            },
            "aggregate": self.aggregate,
            "timing": {"elapsed_seconds": self.elapsed_seconds},
        }
        if self.dates is not None:
            doc["dates"] = self.dates
        return doc


def _report_dict(r: ResidualReport) -> dict:
    return {
        "method": r.method,
        "metric": r.metric,
        "n_points": r.n_points,
        "total": r.total,
        "mean": r.mean,
        "per_point": [float(v) for v in r.per_point],
    }


def _comparison_dict(c: ComparisonReport) -> dict:
    return {
        "winner": c.winner,
        "margin_per_point": c.margin_per_point,
        "causal": _report_dict(c.causal),
        "linear": _report_dict(c.linear),
    }


def report_from_dict(doc: dict) -> ResidualReport:
    """Rebuild a residual report from its serialized form."""
    return ResidualReport(
        method=doc["method"], metric=doc["metric"], per_point=doc["per_point"]
    )


def emit_report(report: RunReport, fmt: str = "json") -> bytes:
    """Serialize a run report as UTF-8 bytes in ``json`` or ``csv`` form."""
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"
        return text.encode("utf-8")
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["series", "t", "value"])
        for name, s in report.series.items():
            for t, v in zip(s.times(), s.values):
                writer.writerow([name, int(t), repr(float(v))])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(data: bytes) -> dict:
    """Inverse of the JSON side of :func:`emit_report`."""
    return json.loads(data.decode("utf-8"))


def numeric_content(doc: dict) -> dict:
    """Copy of a report document without its timing block.

    Two runs of the same config must agree on this exactly.
    """
    return {k: v for k, v in doc.items() if k != "timing"}
