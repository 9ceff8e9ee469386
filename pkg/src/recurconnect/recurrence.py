"""Recurrence matrices, diagonal recurrence profiles, and twin classes.

A recurrence matrix marks every pair of trajectory points that lie within a
threshold distance of each other; the boundary counts as recurrent (a pair at
distance exactly epsilon is marked 1). The tau-recurrence profile p(tau) is
the mean of the diagonal tau steps from the main diagonal, a generalized
autocorrelation of recurrence times. Twins are points whose matrix columns
are identical, i.e. points sharing the same neighborhood membership pattern.

Matrices are stored bit-packed by rows: a full-length daily series of ~4000
points packs into ~2 MB, and twin detection reduces to grouping identical
packed rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NORMS",
    "RecurrenceConfig",
    "RecurrenceMatrix",
    "TauRecurrenceProfile",
    "TwinClasses",
    "recurrence_matrix",
    "tau_recurrence_rate",
    "find_twins",
    "write_pbm",
]

NORMS = ("absolute", "euclidean", "maximum")


@dataclass(frozen=True)
class RecurrenceConfig:
    """Threshold distance and norm for recurrence detection.

    ``norm=None`` resolves per input: absolute difference for scalar series,
    Euclidean for vector trajectories. For scalar data all three norms
    coincide.
    """

    epsilon: float = 0.1
    norm: str | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.norm is not None and self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}, got {self.norm!r}")


@dataclass(frozen=True)
class RecurrenceMatrix:
    """Symmetric binary matrix of within-threshold point pairs, packed by rows."""

    n: int
    bits: np.ndarray = field(repr=False)  # uint8, shape (n, ceil(n/8))
    config: RecurrenceConfig

    def dense(self) -> np.ndarray:
        """Unpack to a boolean (n, n) array."""
        return np.unpackbits(self.bits, axis=1, count=self.n).astype(bool)

    def recurrence_rate(self) -> float:
        counts = np.unpackbits(self.bits, axis=1, count=self.n).sum()
        return float(counts) / (self.n * self.n)


@dataclass(frozen=True)
class TauRecurrenceProfile:
    """Recurrence probabilities p(tau) for tau = 0..tau_max; p(0) == 1."""

    p: np.ndarray = field(repr=False)
    tau_max: int

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)
        if len(arr) != self.tau_max + 1:
            raise ValueError("profile length must be tau_max + 1")
        if arr[0] != 1.0:
            raise ValueError("p(0) must be 1")
        if np.any((arr < 0) | (arr > 1)):
            raise ValueError("p(tau) must lie in [0, 1]")


@dataclass(frozen=True)
class TwinClasses:
    """Partition of point indices into groups with identical matrix columns.

    ``classes`` are disjoint, cover 0..n-1, and singletons mark twin-less
    points. ``class_of[i]`` is the index into ``classes`` for point i.
    """

    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray = field(repr=False)

    @property
    def n_points(self) -> int:
        return len(self.class_of)

    def members(self, i: int) -> tuple[int, ...]:
        return self.classes[self.class_of[i]]

    def twin_count(self) -> int:
        """Number of points that have at least one twin."""
        return sum(len(c) for c in self.classes if len(c) > 1)


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0 or arr.ndim > 2:
        raise ValueError("points must be a 1-d series or an (N, m) trajectory")
    if arr.dtype == object:
        raise ValueError("ragged trajectory: points must share one dimension")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinates")
    return arr


def resolve_norm(points: np.ndarray, norm: str | None) -> str:
    if norm is None:
        return "absolute" if points.ndim == 1 else "euclidean"
    if norm == "absolute" and points.ndim != 1:
        raise ValueError("absolute norm applies to scalar series only")
    return norm


def _distance_matrix(points: np.ndarray, norm: str) -> np.ndarray:
    if norm == "absolute":
        return np.abs(points[:, None] - points[None, :])
    diff = points[:, None, :] - points[None, :, :]
    if norm == "euclidean":
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if norm == "maximum":
        return np.abs(diff).max(axis=2)
    raise ValueError(f"unknown norm {norm!r}")


def recurrence_matrix(points, config: RecurrenceConfig = RecurrenceConfig()) -> RecurrenceMatrix:
    """Build the recurrence matrix of a trajectory.

    Entry (i, j) is 1 iff the distance between points i and j is <= epsilon
    under the configured norm.
    """
    arr = _as_points(points)
    n = len(arr)
    if n < 2:
        raise ValueError("need at least 2 points")
    norm = resolve_norm(arr, config.norm)
    hits = _distance_matrix(arr, norm) <= config.epsilon
    resolved = RecurrenceConfig(config.epsilon, norm)
    return RecurrenceMatrix(n, np.packbits(hits, axis=1), resolved)


def tau_recurrence_rate(matrix: RecurrenceMatrix, tau_max: int | None = None) -> TauRecurrenceProfile:
    """Diagonal-wise recurrence profile p(tau) = mean of entries (i, i+tau).

    tau_max defaults to n-1; note p(tau) near tau = n-1 averages very few
    terms.
    """
    n = matrix.n
    if tau_max is None:
        tau_max = n - 1
    if not 0 < tau_max < n:
        raise ValueError(f"tau_max must be in (0, {n}), got {tau_max}")
    rows, cols = np.nonzero(matrix.dense())
    offsets = cols - rows
    counts = np.bincount(offsets[offsets >= 0], minlength=n)[: tau_max + 1]
    denom = n - np.arange(tau_max + 1)
    return TauRecurrenceProfile(counts / denom, tau_max)


def _tau_profile_scalar(values: np.ndarray, epsilon: float, tau_max: int) -> np.ndarray:
    """p(tau) for a scalar series without materializing the matrix.

    Performs exactly the comparisons of the matrix route, so the result is
    bit-identical to tau_recurrence_rate(recurrence_matrix(...)).
    """
    n = len(values)
    p = np.empty(tau_max + 1)
    p[0] = 1.0
    for tau in range(1, tau_max + 1):
        hits = np.abs(values[: n - tau] - values[tau:]) <= epsilon
        p[tau] = np.count_nonzero(hits) / (n - tau)
    return p


def find_twins(matrix: RecurrenceMatrix) -> TwinClasses:
    """Group points whose matrix columns are identical.

    The matrix is symmetric, so identical columns are identical packed rows;
    grouping is a unique() over rows. Exact full-column equality is required,
    including the entries at the two candidate positions themselves.
    """
    _, inverse = np.unique(matrix.bits, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    groups: dict[int, list[int]] = {}
    for idx, cls in enumerate(inverse):
        groups.setdefault(int(cls), []).append(idx)
    classes = tuple(tuple(groups[k]) for k in sorted(groups))
    class_of = np.empty(matrix.n, dtype=np.intp)
    for ci, members in enumerate(classes):
        for idx in members:
            class_of[idx] = ci
    class_of.setflags(write=False)
    return TwinClasses(classes, class_of)


def write_pbm(matrix: RecurrenceMatrix, path) -> None:
    """Export as a portable bitmap (PBM P1); 1 = recurrent = black.

    Raster rows run top to bottom, so the last point index is the top row and
    the origin sits at the bottom-left like a conventional recurrence plot.
    """
    dense = matrix.dense()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"P1\n{matrix.n} {matrix.n}\n")
        for row in dense[::-1]:
            line = "".join("1" if v else "0" for v in row)
            for start in range(0, len(line), 70):
                fh.write(line[start : start + 70] + "\n")
