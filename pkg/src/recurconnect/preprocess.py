"""Normalization and autocorrelation/mutual-information diagnostics.

Conventions used throughout the package:

* standard deviations are population (divide-by-N) everywhere,
* the ACF is the biased (divide-by-N) estimator over overlapping segments,
  which keeps every coefficient in [-1, 1],
* the autocorrelation time is the smallest lag whose ACF is strictly below
  1/e (first crossing, no interpolation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSeriesError, NoDecorrelationError

__all__ = [
    "NormalizedSeries",
    "AcfSummary",
    "normalize",
    "autocorrelation",
    "autocorrelation_time",
    "acf_summary",
    "mutual_information",
]

ACF_FLOOR = 1.0 / math.e


@dataclass(frozen=True)
class NormalizedSeries:
    """A series rescaled to zero mean and unit population standard deviation."""

    values: np.ndarray = field(repr=False)
    source_mean: float
    source_std: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if abs(float(arr.mean())) > 1e-10:
            raise ValueError("normalized mean exceeds 1e-10")
        if abs(float(arr.std()) - 1.0) > 1e-10:
            raise ValueError("normalized std differs from 1 by more than 1e-10")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AcfSummary:
    """ACF coefficients for lags 0..max_lag plus the 1/e decay lag tau_c."""

    acf: np.ndarray = field(repr=False)
    tau_c: int

    def __post_init__(self):
        arr = np.asarray(self.acf, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "acf", arr)
        if arr[0] != 1.0:
            raise ValueError("acf[0] must be 1")
        if np.any(np.abs(arr) > 1.0 + 1e-12):
            raise ValueError("|acf| must not exceed 1")
        if not (0 < self.tau_c < len(arr)) or arr[self.tau_c] >= ACF_FLOOR:
            raise ValueError("tau_c is not the first crossing below 1/e")


def _znorm(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Zero-mean unit-std rescaling, population convention. Internal fast path."""
    mean = float(values.mean())
    std = float(values.std())
    if std == 0.0 or not np.isfinite(std):
        raise DegenerateSeriesError("constant series: zero variance")
    return (values - mean) / std, mean, std


def normalize(values) -> NormalizedSeries:
    """Rescale to zero mean and unit population standard deviation."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a 1-d series")
    if len(arr) < 2:
        raise DegenerateSeriesError("need at least 2 values to normalize")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite values")
    scaled, mean, std = _znorm(arr)
    return NormalizedSeries(scaled, mean, std)


def _acf(values: np.ndarray, max_lag: int) -> np.ndarray:
    centered = values - values.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise DegenerateSeriesError("constant series: zero variance")
    full = np.correlate(centered, centered, mode="full")
    return full[len(values) - 1 : len(values) + max_lag] / denom


def autocorrelation(values, max_lag: int) -> np.ndarray:
    """Biased-estimator ACF for lags 0..max_lag (acf[0] == 1)."""
    arr = np.asarray(values, dtype=float)
    if not 0 <= max_lag < len(arr):
        raise ValueError(f"max_lag {max_lag} out of range for length {len(arr)}")
    return _acf(arr, max_lag)


def _first_crossing(acf: np.ndarray) -> int | None:
    below = np.flatnonzero(acf[1:] < ACF_FLOOR)
    return int(below[0]) + 1 if below.size else None


def autocorrelation_time(values) -> int:
    """Smallest lag at which the ACF falls below 1/e.

    The search covers lags 1..N//2; if the ACF stays at or above 1/e over
    that whole range the series is reported as not decorrelating.
    """
    arr = np.asarray(values, dtype=float)
    if len(arr) < 2:
        raise DegenerateSeriesError("need at least 2 values")
    acf = _acf(arr, len(arr) // 2)
    tau = _first_crossing(acf)
    if tau is None:
        raise NoDecorrelationError(
            f"ACF never falls below 1/e within {len(arr) // 2} lags"
        )
    return tau


def acf_summary(values, max_lag: int) -> AcfSummary:
    """ACF up to max_lag together with the autocorrelation time."""
    return AcfSummary(autocorrelation(values, max_lag), autocorrelation_time(values))


def _quantile_bins(values: np.ndarray, n_bins: int) -> np.ndarray:
    # Ordinal ranks, ties broken by position, so bins stay equiprobable
    # even with repeated values.
    ranks = np.empty(len(values), dtype=np.intp)
    ranks[np.argsort(values, kind="stable")] = np.arange(len(values))
    return (ranks * n_bins) // len(values)


def mutual_information(x, y, n_bins: int = 16) -> float:
    """Histogram mutual information in nats over equiprobable (quantile) bins."""
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if ax.shape != ay.shape:
        raise ValueError(f"length mismatch: {len(ax)} vs {len(ay)}")
    if len(ax) < 64:
        raise ValueError("need at least 64 samples")
    if not (np.all(np.isfinite(ax)) and np.all(np.isfinite(ay))):
        raise ValueError("non-finite values")
    if ax.std() == 0.0 or ay.std() == 0.0:
        raise DegenerateSeriesError("constant input")
    bx = _quantile_bins(ax, n_bins)
    by = _quantile_bins(ay, n_bins)
    joint = np.bincount(bx * n_bins + by, minlength=n_bins * n_bins).astype(float)
    joint = joint.reshape(n_bins, n_bins) / len(ax)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    mi = float(np.sum(joint[nz] * np.log(joint[nz] / np.outer(px, py)[nz])))
    return max(mi, 0.0)
