"""Pairwise connectivity measures over recurrence profiles and raw series.

Two measures are provided. The recurrence-profile correlation correlates the
p(tau) curves of two trajectories; because every profile starts at p(0) = 1
and stays autocorrelated up to the decorrelation lag, the raw version is
biased upward, so the corrected form drops all lags tau <= tau_c with
tau_c = max of the two series' autocorrelation times and correlates only the
remainder. The Pearson coefficient is the classical correlation under the
population convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, InsufficientLagsError
from .preprocess import NormalizedSeries
from .recurrence import TauRecurrenceProfile

__all__ = ["MeasureValue", "MIN_USABLE_LAGS", "cpr", "cpr_uncorrected", "pearson"]

# Below ~10 samples a correlation coefficient is statistically meaningless;
# fail loudly instead of returning one.
MIN_USABLE_LAGS = 10

CPR = "CPR"
PEARSON = "PEARSON"


@dataclass(frozen=True)
class MeasureValue:
    """A connectivity measure in [-1, 1] plus the lag cut used (CPR only)."""

    value: float
    kind: str
    tau_c_used: int | None = None

    def __post_init__(self):
        if abs(self.value) > 1.0 + 1e-9:
            raise ValueError(f"|{self.kind}| exceeds 1: {self.value}")
        if self.kind not in (CPR, PEARSON):
            raise ValueError(f"unknown measure kind {self.kind!r}")


def _segment_correlation(a: np.ndarray, b: np.ndarray) -> float:
    # Mean product of the two zero-mean unit-std (population) segments,
    # written as a normalized dot product.
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0.0 or vb == 0.0:
        raise DegenerateSeriesError(
            "recurrence profile segment has zero variance (saturated or empty matrix?)"
        )
    return float(np.dot(da, db)) / math.sqrt(va * vb)


def cpr(
    px: TauRecurrenceProfile,
    py: TauRecurrenceProfile,
    tau_c_x: int,
    tau_c_y: int,
) -> MeasureValue:
    """Corrected recurrence-profile correlation.

    Restricts both profiles to tau in (tau_c, tau_max] with
    tau_c = max(tau_c_x, tau_c_y), rescales each restricted segment to zero
    mean and unit population std, and returns the mean elementwise product.
    """
    if px.tau_max != py.tau_max:
        raise ValueError(
            f"profiles disagree on tau_max: {px.tau_max} vs {py.tau_max}"
        )
    tau_c = max(int(tau_c_x), int(tau_c_y))
    if tau_c < 0:
        raise ValueError("autocorrelation times must be nonnegative")
    usable = px.tau_max - tau_c
    if usable < MIN_USABLE_LAGS:
        raise InsufficientLagsError(
            f"only {usable} lags beyond tau_c={tau_c}, need {MIN_USABLE_LAGS}"
        )
    value = _segment_correlation(px.p[tau_c + 1 :], py.p[tau_c + 1 :])
    return MeasureValue(value, CPR, tau_c_used=tau_c)


def cpr_uncorrected(px: TauRecurrenceProfile, py: TauRecurrenceProfile) -> MeasureValue:
    """Recurrence-profile correlation over the full lag range, tau = 0 included.

    Retained to demonstrate the upward bias of the shared p(0) = 1 head; use
    cpr() for analysis.
    """
    if px.tau_max != py.tau_max:
        raise ValueError(
            f"profiles disagree on tau_max: {px.tau_max} vs {py.tau_max}"
        )
    if px.tau_max + 1 < MIN_USABLE_LAGS:
        raise InsufficientLagsError(
            f"only {px.tau_max + 1} lags, need {MIN_USABLE_LAGS}"
        )
    value = _segment_correlation(px.p, py.p)
    return MeasureValue(value, CPR, tau_c_used=0)


def pearson(x: NormalizedSeries, y: NormalizedSeries) -> MeasureValue:
    """Pearson correlation: the mean product of two normalized series."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return MeasureValue(float(np.mean(x.values * y.values)), PEARSON)
