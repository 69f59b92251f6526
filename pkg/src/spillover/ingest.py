"""Loading and alignment of event-level and monthly data.

Event files are daily CSVs (one row per policy announcement); monthly panels
are built by aggregating surprises into calendar months (zero in months with
no announcement) and aligning macro series over a common span. All loaders
fail loudly: malformed rows, duplicate dates, gaps, and invalid transforms
raise ``IngestError`` instead of silently patching the data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np

VALID_TRANSFORMS = ("level", "log", "percent")
VALID_ROLES = ("surprise", "us_macro", "em_macro")


class IngestError(ValueError):
    """Raised for malformed, inconsistent, or gap-ridden input data."""


def month_index(year: int, month: int) -> int:
    """Serial month number (0 = January year 0)."""
    if not 1 <= month <= 12:
        raise IngestError(f"month out of range: {month}")
    return year * 12 + (month - 1)


def parse_month(text: str) -> int:
    """Parse 'YYYY-MM' into a serial month index."""
    parts = text.strip().split("-")
    if len(parts) != 2:
        raise IngestError(f"bad month {text!r}, expected YYYY-MM")
    try:
        year, month = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise IngestError(f"bad month {text!r}: {exc}") from None
    return month_index(year, month)


def format_month(idx: int) -> str:
    year, month = divmod(idx, 12)
    return f"{year:04d}-{month + 1:02d}"


def _parse_float(text: str, *, where: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise IngestError(f"{where}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise IngestError(f"{where}: non-finite value {text!r}")
    return value


@dataclass(frozen=True)
class SurpriseEvent:
    """One policy announcement.

    d_rate is the interest-rate surprise in percentage points (3-month fed
    funds future window change), d_stock the stock-index surprise in percent.
    ner_change maps country name to the percent change of its nominal
    exchange rate against the dollar over the 2-day event window (positive =
    domestic currency depreciates).
    """

    date: date
    d_rate: float
    d_stock: float
    ner_change: dict[str, float] = field(default_factory=dict)

    @property
    def month(self) -> int:
        return month_index(self.date.year, self.date.month)


@dataclass(frozen=True)
class SeriesSpec:
    """Where one monthly series comes from and how to treat it."""

    name: str
    path: str
    column: str
    transform: str = "level"
    role: str = "em_macro"

    def __post_init__(self):
        if self.transform not in VALID_TRANSFORMS:
            raise IngestError(f"series {self.name!r}: unknown transform {self.transform!r}")
        if self.role not in VALID_ROLES:
            raise IngestError(f"series {self.name!r}: unknown role {self.role!r}")


@dataclass(frozen=True)
class VariableInfo:
    """Descriptor of one panel column."""

    name: str
    role: str
    transform: str = "level"


class MonthlyPanel:
    """T x N matrix of monthly observables with per-column roles.

    Surprise columns are exactly zero in months without an event; macro
    columns have no missing cells (gaps are load-time errors).
    """

    def __init__(self, start_month: int, values: np.ndarray, columns: list[VariableInfo]):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise IngestError("panel values must be a 2-d array")
        if values.shape[1] != len(columns):
            raise IngestError(
                f"panel has {values.shape[1]} columns but {len(columns)} descriptors"
            )
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise IngestError("duplicate column names in panel")
        if not np.all(np.isfinite(values)):
            raise IngestError("panel contains non-finite cells")
        self.start_month = int(start_month)
        self.values = values
        self.columns = list(columns)

    @property
    def n_months(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def months(self) -> list[int]:
        return [self.start_month + t for t in range(self.n_months)]

    def role_indices(self, role: str) -> list[int]:
        return [i for i, c in enumerate(self.columns) if c.role == role]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise IngestError(f"no column named {name!r}") from None
        return self.values[:, j]

    def hstack(self, other: "MonthlyPanel") -> "MonthlyPanel":
        """Join two panels column-wise over the intersection of their spans."""
        lo = max(self.start_month, other.start_month)
        hi = min(self.start_month + self.n_months, other.start_month + other.n_months)
        if hi <= lo:
            raise IngestError("panels have no overlapping months")
        a = self.values[lo - self.start_month : hi - self.start_month]
        b = other.values[lo - other.start_month : hi - other.start_month]
        return MonthlyPanel(lo, np.hstack([a, b]), self.columns + other.columns)

    def to_csv(self, path) -> None:
        """Write the panel; float cells use repr so a reload is bit-exact."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date"] + self.names)
            for t in range(self.n_months):
                row = [format_month(self.start_month + t)]
                row += [repr(v) for v in self.values[t].tolist()]
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path, columns: list[VariableInfo] | None = None) -> "MonthlyPanel":
        """Reload a panel written by :meth:`to_csv`.

        Column descriptors default to role 'em_macro' / transform 'level'
        when not supplied; values round-trip bit-exactly.
        """
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "date":
                raise IngestError(f"{path}: expected a 'date' header column")
            names = header[1:]
            months, rows = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise IngestError(f"{path}:{lineno}: expected {len(header)} fields")
                months.append(parse_month(row[0]))
                rows.append([_parse_float(v, where=f"{path}:{lineno}") for v in row[1:]])
        if not rows:
            raise IngestError(f"{path}: no data rows")
        for prev, cur in zip(months, months[1:]):
            if cur != prev + 1:
                raise IngestError(
                    f"{path}: months not consecutive at {format_month(cur)}"
                )
        if columns is None:
            columns = [VariableInfo(n, "em_macro", "level") for n in names]
        if [c.name for c in columns] != names:
            raise IngestError(f"{path}: header does not match supplied descriptors")
        return cls(months[0], np.array(rows), columns)


def load_events(path, ner_columns: list[str] | None = None) -> list[SurpriseEvent]:
    """Load announcement events from a CSV with columns date, d_rate, d_stock.

    Any further columns (or the subset named by ``ner_columns``) are read as
    per-country exchange-rate changes; empty cells mean the country is
    missing for that event. Events are returned sorted by date.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        required = ("date", "d_rate", "d_stock")
        for col in required:
            if col not in reader.fieldnames:
                raise IngestError(f"{path}: missing required column {col!r}")
        if ner_columns is None:
            ner_columns = [c for c in reader.fieldnames if c not in required]
        events = []
        seen: set[date] = set()
        for lineno, row in enumerate(reader, start=2):
            where = f"{path}:{lineno}"
            try:
                day = date.fromisoformat(row["date"].strip())
            except (ValueError, AttributeError):
                raise IngestError(f"{where}: bad date {row.get('date')!r}") from None
            if day in seen:
                raise IngestError(f"{where}: duplicate event date {day.isoformat()}")
            seen.add(day)
            d_rate = _parse_float(row["d_rate"], where=f"{where} (d_rate)")
            d_stock = _parse_float(row["d_stock"], where=f"{where} (d_stock)")
            ner = {}
            for c in ner_columns:
                cell = (row.get(c) or "").strip()
                if cell:
                    ner[c] = _parse_float(cell, where=f"{where} ({c})")
            events.append(SurpriseEvent(day, d_rate, d_stock, ner))
    events.sort(key=lambda e: e.date)
    return events


def aggregate_to_monthly(
    events: list[SurpriseEvent],
    start_month: int,
    end_month: int,
    rate_name: str = "rate_surprise",
    stock_name: str = "stock_surprise",
) -> MonthlyPanel:
    """Sum event surprises into calendar months over [start, end] inclusive.

    Months with no event hold exactly 0.0 in both surprise columns; months
    with several announcements hold the sum of their surprises.
    """
    if end_month < start_month:
        raise IngestError("end month precedes start month")
    n = end_month - start_month + 1
    values = np.zeros((n, 2))
    for ev in events:
        t = ev.month - start_month
        if not 0 <= t < n:
            raise IngestError(
                f"event on {ev.date.isoformat()} falls outside the panel span"
            )
        values[t, 0] += ev.d_rate
        values[t, 1] += ev.d_stock
    cols = [
        VariableInfo(rate_name, "surprise", "percent"),
        VariableInfo(stock_name, "surprise", "percent"),
    ]
    return MonthlyPanel(start_month, values, cols)


def load_series(spec: SeriesSpec) -> tuple[list[int], list[float]]:
    """Read one monthly series (date + value column) and apply its transform."""
    with open(spec.path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "date" not in reader.fieldnames:
            raise IngestError(f"{spec.path}: missing 'date' column")
        if spec.column not in reader.fieldnames:
            raise IngestError(f"{spec.path}: missing column {spec.column!r} for series {spec.name!r}")
        months, values = [], []
        for lineno, row in enumerate(reader, start=2):
            cell = (row.get(spec.column) or "").strip()
            if not cell:
                continue
            m = parse_month(row["date"])
            v = _parse_float(cell, where=f"{spec.path}:{lineno} ({spec.name})")
            if spec.transform == "log":
                if v <= 0:
                    raise IngestError(
                        f"series {spec.name!r}, month {format_month(m)}: "
                        f"log transform of non-positive value {v}"
                    )
                v = math.log(v)
            months.append(m)
            values.append(v)
    if not months:
        raise IngestError(f"series {spec.name!r}: no observations")
    order = np.argsort(months)
    months = [months[i] for i in order]
    values = [values[i] for i in order]
    for prev, cur in zip(months, months[1:]):
        if cur == prev:
            raise IngestError(f"series {spec.name!r}: duplicate month {format_month(cur)}")
        if cur != prev + 1:
            raise IngestError(
                f"series {spec.name!r}: gap before {format_month(cur)} "
                "(no silent interpolation)"
            )
    return months, values


def load_panel(
    specs: list[SeriesSpec],
    span: tuple[int, int] | None = None,
) -> MonthlyPanel:
    """Align several monthly series over the intersection of their spans.

    ``span=(start, end)`` further restricts the window; a series that does
    not cover the requested window is an error.
    """
    if not specs:
        raise IngestError("no series specified")
    loaded = [load_series(s) for s in specs]
    lo = max(m[0] for m, _ in loaded)
    hi = min(m[-1] for m, _ in loaded)
    if span is not None:
        if span[0] < lo or span[1] > hi:
            raise IngestError(
                f"requested span {format_month(span[0])}..{format_month(span[1])} is not "
                f"covered by every series (common span {format_month(lo)}..{format_month(hi)})"
            )
        lo, hi = span
    if hi < lo:
        raise IngestError("series have no overlapping months")
    n = hi - lo + 1
    values = np.empty((n, len(specs)))
    for j, (months, vals) in enumerate(loaded):
        off = lo - months[0]
        values[:, j] = vals[off : off + n]
    cols = [VariableInfo(s.name, s.role, s.transform) for s in specs]
    return MonthlyPanel(lo, values, cols)


def assemble_var_panel(
    events: list[SurpriseEvent],
    specs: list[SeriesSpec],
    span: tuple[int, int] | None = None,
) -> MonthlyPanel:
    """Build the estimation panel: surprise block first, then macro series."""
    macro = load_panel(specs, span)
    lo, hi = macro.start_month, macro.start_month + macro.n_months - 1
    inside = [e for e in events if lo <= e.month <= hi]
    surprises = aggregate_to_monthly(inside, lo, hi)
    return surprises.hstack(macro)
