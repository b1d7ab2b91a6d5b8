"""Utility and privacy metrics for simulation trials.

Two error views: the relative absolute error of per-household totals (how
much noise distorts consumption and bills) and the Pearson correlation of
one household's masked daily profile against its true profile (how little
an observer learns). Trials are repeated over seeds and averaged.
"""

from __future__ import annotations

import statistics
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, ZeroDenominator


@dataclass(frozen=True)
class TrialResult:
    """Metrics of one (scheme, seed) simulation trial."""

    scheme: str
    seed: int
    mae_total_consumption: float
    mae_bill: float
    correlation: float

    def __post_init__(self):
        if self.mae_total_consumption < 0.0 or self.mae_bill < 0.0:
            raise ValueError("mae values must be >= 0")
        if not -1.0 <= self.correlation <= 1.0:
            raise ValueError(f"correlation must lie in [-1, 1], got {self.correlation}")


@dataclass(frozen=True)
class SchemeSummary:
    """Per-scheme mean and sample standard deviation over trials."""

    scheme: str
    trials: int
    mae_total_mean: float
    mae_total_std: float
    mae_bill_mean: float
    mae_bill_std: float
    correlation_mean: float
    correlation_std: float
    abs_correlation_mean: float
    abs_correlation_std: float


# The usual name for this metric is "mean absolute error" but the quantity
# is a mean of per-household RELATIVE errors; emitted metadata repeats this
# so downstream consumers do not misread the scale.
MAE_DEFINITION = "mean over households of |true_total - masked_total| / true_total"


def mae(true_totals, masked_totals) -> float:
    """Mean relative absolute error of per-household totals.

    Raises:
        ZeroDenominator: a true total is zero or negative (relative error
            undefined).
    """
    true = np.asarray(true_totals, dtype=float)
    masked = np.asarray(masked_totals, dtype=float)
    if true.shape != masked.shape:
        raise ValueError(f"shape mismatch: {true.shape} vs {masked.shape}")
    if true.size == 0:
        raise ValueError("empty input")
    if np.any(true <= 0.0):
        raise ZeroDenominator("true totals must be positive for relative error")
    return float(np.mean(np.abs(true - masked) / true))


def pearson_correlation(series_a, series_b) -> float:
    """Pearson correlation coefficient of two equal-length series.

    Identical series and exact negations return +/-1.0 exactly; otherwise
    the coefficient is computed from centered sums and clipped to [-1, 1]
    against rounding spill.

    Raises:
        DegenerateSeries: either series is constant.
    """
    a = np.asarray(series_a, dtype=float)
    b = np.asarray(series_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"need two equal-length 1-d series, got {a.shape} vs {b.shape}")
    if a.size < 2:
        raise ValueError("need at least 2 points")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise DegenerateSeries("constant series has undefined correlation")
    if np.array_equal(a, b):
        return 1.0
    if np.array_equal(a, -b):
        return -1.0
    da = a - a.mean()
    db = b - b.mean()
    r = float(da @ db / np.sqrt((da @ da) * (db @ db)))
    return max(-1.0, min(1.0, r))


def average_trials(results) -> dict[str, SchemeSummary]:
    """Group trial results by scheme and average each metric.

    Returns one summary per scheme with arithmetic means and sample
    standard deviations (0.0 for a single trial), keyed by scheme label.
    """
    by_scheme: dict[str, list[TrialResult]] = defaultdict(list)
    for result in results:
        by_scheme[result.scheme].append(result)
    if not by_scheme:
        raise ValueError("no trial results supplied")

    def mean_std(values: list[float]) -> tuple[float, float]:
        mean = statistics.fmean(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        return mean, std

    summaries = {}
    for scheme in sorted(by_scheme):
        trials = by_scheme[scheme]
        mt, st = mean_std([t.mae_total_consumption for t in trials])
        mb, sb = mean_std([t.mae_bill for t in trials])
        mc, sc = mean_std([t.correlation for t in trials])
        ma, sa = mean_std([abs(t.correlation) for t in trials])
        summaries[scheme] = SchemeSummary(
            scheme=scheme,
            trials=len(trials),
            mae_total_mean=mt,
            mae_total_std=st,
            mae_bill_mean=mb,
            mae_bill_std=sb,
            correlation_mean=mc,
            correlation_std=sc,
            abs_correlation_mean=ma,
            abs_correlation_std=sa,
        )
    return summaries
