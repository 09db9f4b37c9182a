"""Descriptive statistics shared by the metric modules.

The quartile rule is fixed to linear interpolation between order
statistics at rank ``(n-1)*p`` (the common "type 7" convention), so any
published summary can be reproduced byte-for-byte from the same sample.
Outlier fences sit at 1.5 IQR beyond the quartiles (Tukey); values above
the third quartile are additionally reported as "above the box" even when
they stay inside the fences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, NonFiniteValue

Labeled = tuple[str, float]


@dataclass(frozen=True)
class BoxplotSummary:
    """Five-number summary with IQR fences and labeled outliers."""

    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    iqr: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[Labeled, ...]
    above_box: tuple[Labeled, ...]


def _check_sample(sample: Sequence[float]) -> None:
    if not sample:
        raise EmptyInput("empty sample")
    for value in sample:
        if not math.isfinite(value):
            raise NonFiniteValue(f"sample contains {value!r}")


def mean(sample: Sequence[float]) -> float:
    """Arithmetic mean of a non-empty finite sample."""
    _check_sample(sample)
    return math.fsum(sample) / len(sample)


def quantile(sample: Sequence[float], p: float) -> float:
    """Linear-interpolation quantile at fraction ``p`` in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be within [0, 1], got {p}")
    _check_sample(sample)
    ordered = sorted(sample)
    rank = (len(ordered) - 1) * p
    below = math.floor(rank)
    fraction = rank - below
    if fraction == 0.0:
        return ordered[below]
    return ordered[below] + (ordered[below + 1] - ordered[below]) * fraction


def boxplot_summary(labeled_sample: Sequence[Labeled]) -> BoxplotSummary:
    """Boxplot summary of labeled values; labels ride along into outliers.

    Whiskers reach the most extreme data points within the fences, clamped
    to the box so the chain min <= whisker_low <= q1 <= median <= q3 <=
    whisker_high <= max always holds.
    """
    if not labeled_sample:
        raise EmptyInput("empty sample")
    values = [value for _, value in labeled_sample]
    _check_sample(values)
    q1 = quantile(values, 0.25)
    median = quantile(values, 0.5)
    q3 = quantile(values, 0.75)
    iqr = q3 - q1
    low_fence = q1 - 1.5 * iqr
    high_fence = q3 + 1.5 * iqr
    inside = [v for v in values if low_fence <= v <= high_fence]
    whisker_low = min(min(inside), q1) if inside else q1
    whisker_high = max(max(inside), q3) if inside else q3
    outliers = tuple(
        (label, value)
        for label, value in labeled_sample
        if value < low_fence or value > high_fence
    )
    above_box = tuple((label, value) for label, value in labeled_sample if value > q3)
    return BoxplotSummary(
        n=len(values),
        min=min(values),
        q1=q1,
        median=median,
        q3=q3,
        max=max(values),
        iqr=iqr,
        whisker_low=whisker_low,
        whisker_high=whisker_high,
        outliers=outliers,
        above_box=above_box,
    )
