"""Twin-surrogate generation and Z-test significance machinery.

A twin surrogate replays the source trajectory's successor map while jumping
uniformly among twins, producing an alternative realization of the same
dynamics that differs only in its initial condition. Starting from a random
point, each step picks one member of the current point's twin class with
equal probability and appends that member's successor; twin-less points
simply continue to their own successor. The successor of the final point is
point 0 (circular continuation), which keeps generation total for twin-free
trajectories; note this changes surrogates of near-twin-free data, which
degenerate to rotated copies of the source.

Reproducibility contract: all randomness derives from numpy SeedSequence
entropy ``seed`` with documented spawn keys. Ensemble member k uses the k-th
spawned child, so results are independent of evaluation order and worker
scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSeriesError
from .recurrence import TwinClasses

__all__ = [
    "SurrogateEnsemble",
    "SignificanceResult",
    "twin_surrogate",
    "generate_ensemble",
    "significance_test",
]


@dataclass(frozen=True)
class SurrogateEnsemble:
    """n surrogate series of length N, stacked row-wise."""

    surrogates: np.ndarray = field(repr=False)  # shape (n, N) or (n, N, m)
    seed: object
    source_label: str = ""

    @property
    def n(self) -> int:
        return len(self.surrogates)


@dataclass(frozen=True)
class SignificanceResult:
    """Observed measure vs. a surrogate null distribution, two-sided Z-test."""

    observed: float
    mu: float
    sigma: float
    z: float
    p_value: float
    alpha: float
    significant: bool
    n_surrogates: int

    def __post_init__(self):
        if self.sigma > 0 and not math.isclose(
            self.z, (self.observed - self.mu) / self.sigma, rel_tol=1e-9, abs_tol=1e-12
        ):
            raise ValueError("z must equal (observed - mu) / sigma")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value out of range: {self.p_value}")
        if self.significant != (self.p_value < self.alpha):
            raise ValueError("significant must mean p_value < alpha")


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _chain_indices(members_of, n: int, rng: np.random.Generator) -> np.ndarray:
    """Source indices visited by one surrogate walk of length n.

    One uniform draw is consumed per appended point regardless of twin-class
    size, so the random stream layout is independent of the twin structure.
    """
    current = int(rng.integers(n))
    draws = rng.random(n - 1)
    indices = np.empty(n, dtype=np.intp)
    indices[0] = current
    for step in range(1, n):
        members = members_of[current]
        pick = members[int(draws[step - 1] * len(members))]
        current = pick + 1 if pick + 1 < n else 0
        indices[step] = current
    return indices


def _validated(points, twins: TwinClasses) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if len(arr) < 2:
        raise ValueError("need at least 2 points")
    if twins.n_points != len(arr):
        raise ValueError(
            f"twin classes cover {twins.n_points} points, trajectory has {len(arr)}"
        )
    return arr


def twin_surrogate(points, twins: TwinClasses, seed) -> np.ndarray:
    """Generate one twin surrogate of a trajectory.

    ``seed`` may be an int, a SeedSequence, or a Generator.
    """
    arr = _validated(points, twins)
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = np.random.default_rng(_seed_sequence(seed))
    members_of = [twins.classes[ci] for ci in twins.class_of]
    return arr[_chain_indices(members_of, len(arr), rng)]


def generate_ensemble(points, twins: TwinClasses, n: int, seed, source_label: str = "") -> SurrogateEnsemble:
    """Generate n twin surrogates from independent child streams of ``seed``."""
    if n < 2:
        raise ValueError("need at least 2 surrogates for a test distribution")
    arr = _validated(points, twins)
    members_of = [twins.classes[ci] for ci in twins.class_of]
    size = len(arr)
    rows = [
        arr[_chain_indices(members_of, size, np.random.default_rng(child))]
        for child in _seed_sequence(seed).spawn(n)
    ]
    return SurrogateEnsemble(np.stack(rows), seed, source_label)


def significance_test(observed: float, surrogate_values, alpha: float) -> SignificanceResult:
    """Two-sided Z-test of an observed measure against surrogate values.

    mu and sigma are the mean and population std of the surrogate values;
    the p-value is 2 * (1 - Phi(|Z|)) against the standard normal.
    """
    values = np.asarray(surrogate_values, dtype=float)
    if len(values) < 2:
        raise ValueError("need at least 2 surrogate values")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    mu = float(values.mean())
    sigma = float(values.std())
    if sigma == 0.0:
        raise DegenerateSeriesError("degenerate surrogate distribution: sigma = 0")
    z = (float(observed) - mu) / sigma
    p_value = math.erfc(abs(z) / math.sqrt(2.0))
    return SignificanceResult(
        observed=float(observed),
        mu=mu,
        sigma=sigma,
        z=z,
        p_value=p_value,
        alpha=alpha,
        significant=p_value < alpha,
        n_surrogates=len(values),
    )
