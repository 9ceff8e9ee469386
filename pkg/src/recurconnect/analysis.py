"""Sliding-window connectivity trends, binning, and peak-aligned comparison.

Per pair and per window the pipeline normalizes the two window segments,
computes each segment's autocorrelation time and recurrence profile, and
evaluates the corrected profile correlation and the Pearson coefficient,
each tested against twin surrogates of the second series. Windows where a
measure cannot be computed (constant segment, undecorrelated segment, too
few usable lags, saturated profiles) are emitted with a status flag rather
than dropped, so every pair trend stays aligned on one window grid.

Seed derivation: the trend pipeline gives window w of pair p the stream
SeedSequence(seed, spawn_key=(p, w)); surrogate k inside a window is that
stream's k-th spawned child. Peak alignment keys streams by offset position.
Results are therefore independent of evaluation order and worker count.

Individual surrogates whose measure is undefined (constant resample,
no decorrelation, degenerate profile segment) are dropped from the null
distribution; a window is flagged ``degenerate_surrogates`` when fewer than
two usable surrogate values remain.
"""

from __future__ import annotations

import datetime
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .connectivity import MIN_USABLE_LAGS, cpr, pearson
from .errors import (
    DegenerateSeriesError,
    InsufficientLagsError,
    NoDecorrelationError,
)
from .ingest import AlignedDataset, TimeSeries
from .preprocess import ACF_FLOOR, NormalizedSeries, _znorm, autocorrelation_time
from .recurrence import (
    RecurrenceConfig,
    TauRecurrenceProfile,
    _tau_profile_scalar,
    find_twins,
    recurrence_matrix,
    resolve_norm,
)
from .surrogates import SignificanceResult, generate_ensemble, significance_test

__all__ = [
    "WindowSpec",
    "WindowRecord",
    "PairTrend",
    "WindowBinCounts",
    "ConnectivityBins",
    "OffsetRecord",
    "PeakAlignment",
    "SpanStats",
    "sliding_pairwise",
    "bin_connectivity",
    "peak_align",
    "window_span_stats",
]

STATUS_OK = "ok"
STATUS_CONSTANT = "constant_segment"
STATUS_NO_DECORRELATION = "no_decorrelation"
STATUS_INSUFFICIENT_LAGS = "insufficient_lags"
STATUS_DEGENERATE_PROFILE = "degenerate_profile"
STATUS_DEGENERATE_SURROGATES = "degenerate_surrogates"


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry in time points."""

    size: int = 250
    step: int = 10

    def __post_init__(self):
        if self.size < 50:
            raise ValueError(f"window size must be at least 50, got {self.size}")
        if not 1 <= self.step <= self.size:
            raise ValueError(f"step must lie in [1, {self.size}], got {self.step}")

    def starts(self, n: int) -> list[int]:
        """Window start indices over a series of length n; no partial windows."""
        if n < self.size:
            raise ValueError(f"series length {n} shorter than window {self.size}")
        return list(range(0, n - self.size + 1, self.step))


@dataclass(frozen=True)
class WindowRecord:
    start_index: int
    start_date: datetime.date | None
    end_date: datetime.date | None
    status: str
    cpr: SignificanceResult | None
    rho: SignificanceResult | None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass(frozen=True)
class PairTrend:
    pair: tuple[str, str]
    records: tuple[WindowRecord, ...]


@dataclass(frozen=True)
class WindowBinCounts:
    start_index: int
    strong_sig: int
    strong_all: int
    moderate_sig: int
    moderate_all: int
    weak_sig: int
    weak_all: int


@dataclass(frozen=True)
class ConnectivityBins:
    """Per-window counts of pairs by |CPR| level.

    Bin boundaries are half-open: strong = [strong, 1], moderate =
    [moderate, strong), weak = [0, moderate). The *_all counts cover every
    computable pair, so their sum is conserved across windows whenever all
    pairs are computable; *_sig counts keep only statistically significant
    values.
    """

    strong_threshold: float
    moderate_threshold: float
    n_pairs: int
    windows: tuple[WindowBinCounts, ...]


@dataclass(frozen=True)
class OffsetRecord:
    offset: int
    x_start_date: datetime.date
    x_end_date: datetime.date
    y_start_date: datetime.date
    y_end_date: datetime.date
    status: str
    cpr: SignificanceResult | None
    rho: SignificanceResult | None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass(frozen=True)
class PeakAlignment:
    pair: tuple[str, str]
    x_peak_date: datetime.date
    y_peak_date: datetime.date
    records: tuple[OffsetRecord, ...]

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(r.offset for r in self.records)


@dataclass(frozen=True)
class SpanStats:
    size: int
    mean_days: float
    std_days: float


# ---------------------------------------------------------------------------
# Per-window measure evaluation
# ---------------------------------------------------------------------------


def _surrogate_profiles(rows: np.ndarray, epsilon: float, tau_max: int) -> np.ndarray:
    """Recurrence profiles of normalized surrogate rows, batched over rows.

    Performs the same float comparisons as the per-series scalar path, so
    each row matches _tau_profile_scalar on that row.
    """
    n_rows, size = rows.shape
    profiles = np.empty((n_rows, tau_max + 1))
    profiles[:, 0] = 1.0
    for tau in range(1, tau_max + 1):
        hits = np.abs(rows[:, : size - tau] - rows[:, tau:]) <= epsilon
        profiles[:, tau] = np.count_nonzero(hits, axis=1) / (size - tau)
    return profiles


def _tau_c_rows(rows: np.ndarray) -> np.ndarray:
    """First lag with ACF below 1/e, per row; -1 where no crossing occurs.

    Matches autocorrelation_time on each row; the lag search stops once
    every row has crossed.
    """
    n_rows, size = rows.shape
    centered = rows - rows.mean(axis=1, keepdims=True)
    denom = np.einsum("ij,ij->i", centered, centered)
    out = np.full(n_rows, -1, dtype=np.intp)
    active = denom > 0.0
    safe_denom = np.where(active, denom, 1.0)
    for lag in range(1, size // 2 + 1):
        if not active.any():
            break
        acf_lag = (
            np.einsum("ij,ij->i", centered[:, lag:], centered[:, : size - lag])
            / safe_denom
        )
        crossed = active & (acf_lag < ACF_FLOOR)
        out[crossed] = lag
        active &= ~crossed
    return out


def _measure_window(
    xw: np.ndarray,
    yw: np.ndarray,
    epsilon: float,
    n_surrogates: int,
    alpha: float,
    stream: np.random.SeedSequence,
    tau_max: int | None = None,
) -> tuple[str, SignificanceResult | None, SignificanceResult | None]:
    """Evaluate both measures with significance on one window pair."""
    size = len(xw)
    if tau_max is None:
        tau_max = size - 1
    try:
        nx, mean_x, std_x = _znorm(np.asarray(xw, dtype=float))
        ny, mean_y, std_y = _znorm(np.asarray(yw, dtype=float))
    except DegenerateSeriesError:
        return STATUS_CONSTANT, None, None
    try:
        tau_cx = autocorrelation_time(nx)
        tau_cy = autocorrelation_time(ny)
    except NoDecorrelationError:
        return STATUS_NO_DECORRELATION, None, None

    px = TauRecurrenceProfile(_tau_profile_scalar(nx, epsilon, tau_max), tau_max)
    py = TauRecurrenceProfile(_tau_profile_scalar(ny, epsilon, tau_max), tau_max)
    try:
        cpr_observed = cpr(px, py, tau_cx, tau_cy)
    except InsufficientLagsError:
        return STATUS_INSUFFICIENT_LAGS, None, None
    except DegenerateSeriesError:
        return STATUS_DEGENERATE_PROFILE, None, None
    rho_observed = pearson(
        NormalizedSeries(nx, mean_x, std_x), NormalizedSeries(ny, mean_y, std_y)
    )

    # Null distributions from twin surrogates of the second series. Each
    # surrogate is renormalized and goes through the same measure path as
    # the observed pair.
    twins = find_twins(recurrence_matrix(ny, RecurrenceConfig(epsilon, "absolute")))
    ensemble = generate_ensemble(ny, twins, n_surrogates, stream)
    normalized_rows = []
    for row in ensemble.surrogates:
        try:
            normalized_rows.append(_znorm(row)[0])
        except DegenerateSeriesError:
            continue
    if len(normalized_rows) < 2:
        return STATUS_DEGENERATE_SURROGATES, None, None
    rows = np.stack(normalized_rows)
    profiles = _surrogate_profiles(rows, epsilon, tau_max)
    tau_c_surrogates = _tau_c_rows(rows)

    rho_null = np.einsum("ij,j->i", rows, nx) / size
    cpr_null = []
    for i in range(len(rows)):
        if tau_c_surrogates[i] < 0:
            continue
        try:
            ps = TauRecurrenceProfile(profiles[i], tau_max)
            cpr_null.append(cpr(px, ps, tau_cx, int(tau_c_surrogates[i])).value)
        except (InsufficientLagsError, DegenerateSeriesError):
            continue
    if len(cpr_null) < 2:
        return STATUS_DEGENERATE_SURROGATES, None, None
    try:
        cpr_sig = significance_test(cpr_observed.value, cpr_null, alpha)
        rho_sig = significance_test(rho_observed.value, rho_null, alpha)
    except DegenerateSeriesError:
        return STATUS_DEGENERATE_SURROGATES, None, None
    return STATUS_OK, cpr_sig, rho_sig


def _window_task(args):
    """Worker entry point: one (pair, window) evaluation."""
    (pair_id, window_index, xw, yw, epsilon, n_surrogates, alpha, seed, tau_max) = args
    stream = np.random.SeedSequence(seed, spawn_key=(pair_id, window_index))
    status, cpr_sig, rho_sig = _measure_window(
        xw, yw, epsilon, n_surrogates, alpha, stream, tau_max
    )
    return pair_id, window_index, status, cpr_sig, rho_sig


def _run_tasks(tasks, workers: int):
    if workers <= 1:
        return [_window_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (workers * 8))
        return list(pool.map(_window_task, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# Public pipeline operations
# ---------------------------------------------------------------------------


def sliding_pairwise(
    data: AlignedDataset,
    spec: WindowSpec = WindowSpec(),
    config: RecurrenceConfig = RecurrenceConfig(),
    n_surrogates: int = 100,
    alpha: float = 0.1,
    seed: int = 0,
    workers: int = 1,
    tau_max: int | None = None,
) -> list[PairTrend]:
    """Windowed connectivity for every pair of series in the dataset.

    Pairs are enumerated in input order, (0,1), (0,2), ..., and window w of
    every pair covers indices [w*step, w*step + size). Deterministic under
    the seed regardless of worker count.
    """
    for s in data.series:
        resolve_norm(np.asarray(s.values), config.norm)
    starts = spec.starts(len(data))
    pairs = list(itertools.combinations(range(len(data.series)), 2))
    tasks = []
    for pair_id, (i, j) in enumerate(pairs):
        xv = data.series[i].values
        yv = data.series[j].values
        for w, s0 in enumerate(starts):
            tasks.append(
                (
                    pair_id,
                    w,
                    np.array(xv[s0 : s0 + spec.size]),
                    np.array(yv[s0 : s0 + spec.size]),
                    config.epsilon,
                    n_surrogates,
                    alpha,
                    seed,
                    tau_max,
                )
            )
    results = {}
    for pair_id, w, status, cpr_sig, rho_sig in _run_tasks(tasks, workers):
        results[pair_id, w] = (status, cpr_sig, rho_sig)

    trends = []
    for pair_id, (i, j) in enumerate(pairs):
        records = []
        for w, s0 in enumerate(starts):
            status, cpr_sig, rho_sig = results[pair_id, w]
            records.append(
                WindowRecord(
                    start_index=s0,
                    start_date=data.dates[s0],
                    end_date=data.dates[s0 + spec.size - 1],
                    status=status,
                    cpr=cpr_sig,
                    rho=rho_sig,
                )
            )
        trends.append(
            PairTrend((data.series[i].label, data.series[j].label), tuple(records))
        )
    return trends


def bin_connectivity(
    trends: list[PairTrend],
    strong: float = 0.8,
    moderate: float = 0.5,
) -> ConnectivityBins:
    """Count pairs per window by |CPR| level, significant-only and all.

    Both count families are produced side by side (they are the two curves
    of the binned-connectivity comparison). Flagged windows of a pair are
    excluded from both counts of that window.
    """
    if not trends:
        raise ValueError("no trends to bin")
    if not 0.0 < moderate < strong:
        raise ValueError(f"need 0 < moderate < strong, got {moderate}, {strong}")
    grid = tuple(r.start_index for r in trends[0].records)
    for t in trends[1:]:
        if tuple(r.start_index for r in t.records) != grid:
            raise ValueError(f"pair {t.pair} is on a different window grid")

    windows = []
    for w, start in enumerate(grid):
        counts = {"strong": [0, 0], "moderate": [0, 0], "weak": [0, 0]}
        n_binnable = 0
        for t in trends:
            record = t.records[w]
            if not record.ok:
                continue
            n_binnable += 1
            v = abs(record.cpr.observed)
            level = "strong" if v >= strong else "moderate" if v >= moderate else "weak"
            counts[level][1] += 1
            if record.cpr.significant:
                counts[level][0] += 1
        total = counts["strong"][1] + counts["moderate"][1] + counts["weak"][1]
        assert total == n_binnable, "bin counts must conserve the pair total"
        windows.append(
            WindowBinCounts(
                start_index=start,
                strong_sig=counts["strong"][0],
                strong_all=counts["strong"][1],
                moderate_sig=counts["moderate"][0],
                moderate_all=counts["moderate"][1],
                weak_sig=counts["weak"][0],
                weak_all=counts["weak"][1],
            )
        )
    return ConnectivityBins(strong, moderate, len(trends), tuple(windows))


def _peak_index(series: TimeSeries, search: tuple[datetime.date, datetime.date]) -> int:
    lo, hi = search
    if lo > hi:
        raise ValueError(f"empty search interval {lo}..{hi}")
    candidates = [i for i, d in enumerate(series.dates) if lo <= d <= hi]
    if not candidates:
        raise ValueError(
            f"{series.label}: no dates inside the search interval {lo}..{hi}"
        )
    values = series.values[candidates]
    return candidates[int(np.argmax(values))]  # argmax takes the earliest tie


def peak_align(
    x: TimeSeries,
    y: TimeSeries,
    search: tuple[datetime.date, datetime.date],
    spec: WindowSpec = WindowSpec(),
    config: RecurrenceConfig = RecurrenceConfig(),
    n_surrogates: int = 100,
    alpha: float = 0.1,
    seed: int = 0,
    before: int = 500,
    after: int = 250,
    workers: int = 1,
    tau_max: int | None = None,
) -> PeakAlignment:
    """Windowed comparison with each series shifted to its own peak.

    The peak is the maximum value inside the search date interval (earliest
    date on ties). Windows start at offsets -before, -before+step, ...,
    +after relative to each series' own peak index, so the two peaks
    coincide at offset 0.
    """
    peak_x = _peak_index(x, search)
    peak_y = _peak_index(y, search)
    offsets = list(range(-before, after + 1, spec.step))
    for label, peak, n in ((x.label, peak_x, len(x)), (y.label, peak_y, len(y))):
        if peak - before < 0:
            raise ValueError(
                f"{label}: window at offset {-before} starts at index {peak - before}"
            )
        if peak + after + spec.size > n:
            raise ValueError(
                f"{label}: window at offset {after} ends at index "
                f"{peak + after + spec.size}, series has {n} points"
            )

    tasks = []
    for k, offset in enumerate(offsets):
        sx = peak_x + offset
        sy = peak_y + offset
        tasks.append(
            (
                0,
                k,
                np.array(x.values[sx : sx + spec.size]),
                np.array(y.values[sy : sy + spec.size]),
                config.epsilon,
                n_surrogates,
                alpha,
                seed,
                tau_max,
            )
        )
    results = {k: (status, c, r) for _, k, status, c, r in _run_tasks(tasks, workers)}

    records = []
    for k, offset in enumerate(offsets):
        sx = peak_x + offset
        sy = peak_y + offset
        status, cpr_sig, rho_sig = results[k]
        records.append(
            OffsetRecord(
                offset=offset,
                x_start_date=x.dates[sx],
                x_end_date=x.dates[sx + spec.size - 1],
                y_start_date=y.dates[sy],
                y_end_date=y.dates[sy + spec.size - 1],
                status=status,
                cpr=cpr_sig,
                rho=rho_sig,
            )
        )
    return PeakAlignment(
        (x.label, y.label), x.dates[peak_x], y.dates[peak_y], tuple(records)
    )


def window_span_stats(dates, sizes, step: int = 10) -> list[SpanStats]:
    """Calendar-day span of sliding windows, per window size.

    For each size, slides a window along the date axis and records the range
    in days between its first and last date; returns the mean and population
    std of those spans.
    """
    dates = list(dates)
    n = len(dates)
    if step < 1:
        raise ValueError("step must be at least 1")
    out = []
    for size in sizes:
        if not 0 < size < n:
            raise ValueError(f"window size {size} out of range for {n} dates")
        spans = [
            float((dates[s + size - 1] - dates[s]).days)
            for s in range(0, n - size + 1, step)
        ]
        arr = np.asarray(spans)
        out.append(SpanStats(size, float(arr.mean()), float(arr.std())))
    return out
