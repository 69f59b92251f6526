"""Event classification and descriptive statistics for announcement surprises.

Announcements are bucketed by the co-movement of the interest-rate and
stock-market surprises: opposite signs (the conventional pattern for a policy
tightening), same signs (rates and equities rising together), or a zero rate
surprise. Exchange-rate behaviour is then summarised within each bucket.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .ingest import SurpriseEvent


class EventClass(enum.Enum):
    NEGATIVE_COMOVEMENT = "negative_comovement"
    POSITIVE_COMOVEMENT = "positive_comovement"
    NO_RATE_RESPONSE = "no_rate_response"
    # nonzero rate surprise with an exactly-zero stock surprise; excluded
    # from both co-movement buckets and reported as a tabulation footline
    AMBIGUOUS = "ambiguous"


def classify_event(event: SurpriseEvent) -> EventClass:
    """Bucket one event by the sign of d_rate * d_stock."""
    if event.d_rate == 0.0:
        return EventClass.NO_RATE_RESPONSE
    product = event.d_rate * event.d_stock
    if product < 0:
        return EventClass.NEGATIVE_COMOVEMENT
    if product > 0:
        return EventClass.POSITIVE_COMOVEMENT
    return EventClass.AMBIGUOUS


@dataclass(frozen=True)
class EventTable:
    """2x3 contingency table of events: stock sign x rate sign.

    Rows are (stock negative, stock positive); columns are
    (rate negative, rate zero, rate positive). Events with a zero stock
    surprise cannot be placed in either row and are counted in ``footline``.
    """

    cells: np.ndarray  # shape (2, 3), integer counts
    footline: int

    @property
    def row_totals(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.cells.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.cells.sum()) + self.footline

    def as_text(self) -> str:
        rows = ["stock<0", "stock>0"]
        cols = ["rate<0", "rate=0", "rate>0"]
        width = 10
        lines = ["".join([" " * width] + [c.rjust(width) for c in cols] + ["total".rjust(width)])]
        for i, label in enumerate(rows):
            cells = [str(int(v)).rjust(width) for v in self.cells[i]]
            lines.append("".join([label.ljust(width)] + cells + [str(int(self.row_totals[i])).rjust(width)]))
        lines.append(
            "".join(
                ["total".ljust(width)]
                + [str(int(v)).rjust(width) for v in self.col_totals]
                + [str(self.total).rjust(width)]
            )
        )
        if self.footline:
            lines.append(f"excluded (stock surprise exactly 0): {self.footline}")
        return "\n".join(lines)


def tabulate_events(events: list[SurpriseEvent]) -> EventTable:
    """Count events in the 2x3 stock-sign x rate-sign table."""
    if not events:
        raise ValueError("cannot tabulate an empty event list")
    cells = np.zeros((2, 3), dtype=int)
    footline = 0
    for ev in events:
        if ev.d_stock == 0.0:
            footline += 1
            continue
        row = 0 if ev.d_stock < 0 else 1
        col = 0 if ev.d_rate < 0 else (1 if ev.d_rate == 0.0 else 2)
        cells[row, col] += 1
    return EventTable(cells, footline)


def class_counts(events: list[SurpriseEvent]) -> dict[EventClass, int]:
    counts = {c: 0 for c in EventClass}
    for ev in events:
        counts[classify_event(ev)] += 1
    return counts


def pooled_depreciations(
    events: list[SurpriseEvent],
    event_class: EventClass | None = None,
) -> np.ndarray:
    """Stack country x event exchange-rate changes for the selected bucket."""
    values = []
    for ev in events:
        if event_class is not None and classify_event(ev) is not event_class:
            continue
        values.extend(ev.ner_change.values())
    return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class DepreciationStats:
    mean: float
    p10: float
    p25: float
    p50: float
    p75: float
    p90: float
    sd: float
    n: int

    def as_row(self) -> list[float]:
        return [self.mean, self.p10, self.p25, self.p50, self.p75, self.p90, self.sd]


def depreciation_stats(
    events: list[SurpriseEvent],
    event_class: EventClass | None = None,
    trim: tuple[float, float] | None = None,
) -> DepreciationStats:
    """Summary statistics of pooled exchange-rate changes.

    ``trim=(10, 90)`` drops observations strictly below the 10th and strictly
    above the 90th percentile of the untrimmed selection before computing
    the statistics.
    """
    values = pooled_depreciations(events, event_class)
    if values.size < 2:
        raise ValueError("need at least 2 depreciation observations")
    if trim is not None:
        lo, hi = np.percentile(values, trim)
        values = values[(values >= lo) & (values <= hi)]
        if values.size < 2:
            raise ValueError("trimming left fewer than 2 observations")
    p10, p25, p50, p75, p90 = np.percentile(values, [10, 25, 50, 75, 90])
    return DepreciationStats(
        mean=float(np.mean(values)),
        p10=float(p10),
        p25=float(p25),
        p50=float(p50),
        p75=float(p75),
        p90=float(p90),
        sd=float(np.std(values, ddof=1)),
        n=int(values.size),
    )


def significance_stars(p_value: float) -> str:
    """*** at 1%, ** at 5%, * at 10%."""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.10:
        return "*"
    return ""


@dataclass(frozen=True)
class CorrelationResult:
    corr: float
    p_value: float
    n: int

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)


def comovement_correlation(
    events: list[SurpriseEvent],
    event_class: EventClass | None = None,
) -> CorrelationResult:
    """Pearson correlation of the rate surprise with exchange-rate changes.

    Pairs are pooled over countries and events in the selected bucket; the
    p-value is the two-sided t-distribution test with n-2 degrees of freedom.
    """
    xs, ys = [], []
    for ev in events:
        if event_class is not None and classify_event(ev) is not event_class:
            continue
        for v in ev.ner_change.values():
            xs.append(ev.d_rate)
            ys.append(v)
    if len(xs) < 3:
        raise ValueError("need at least 3 (rate, exchange-rate) pairs")
    r, p = stats.pearsonr(xs, ys)
    return CorrelationResult(float(r), float(p), len(xs))


@dataclass(frozen=True)
class MeanDiffResult:
    t_stat: float
    p_value: float
    mean_a: float
    mean_b: float


def mean_diff_test(sample_a, sample_b) -> MeanDiffResult:
    """Welch two-sample t-test of equal means (two-sided)."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    t, p = stats.ttest_ind(a, b, equal_var=False)
    return MeanDiffResult(float(t), float(p), float(a.mean()), float(b.mean()))
