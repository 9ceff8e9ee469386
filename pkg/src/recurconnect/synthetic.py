"""Deterministic generators for diagnostic signals: uniform noise and Lorenz.

The Lorenz defaults (sigma=10, rho=28, beta=10/3) are the configuration used
by this project's demo scripts; ``LorenzParams.classic()`` gives the textbook
chaotic parameter set with beta=8/3.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

__all__ = ["LorenzParams", "white_noise", "lorenz", "date_axis"]


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 10.0 / 3.0
    dt: float = 0.01
    n: int = 5000
    initial: tuple[float, float, float] = (1.0, 1.0, 1.0)
    transient: int = 1000  # integration steps discarded before sampling

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.n > 0:
            raise ValueError("n must be positive")
        if self.transient < 0:
            raise ValueError("transient must be nonnegative")

    @classmethod
    def classic(cls, **overrides) -> "LorenzParams":
        """Textbook chaotic parameters (beta = 8/3)."""
        return cls(beta=8.0 / 3.0, **overrides)


def white_noise(n: int, seed) -> np.ndarray:
    """i.i.d. uniform samples on [0, 1), deterministic under the seed."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return np.random.default_rng(seed).random(n)


def _lorenz_field(state: np.ndarray, sigma: float, rho: float, beta: float) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def lorenz(params: LorenzParams = LorenzParams()) -> np.ndarray:
    """Fixed-step RK4 trajectory of the Lorenz system, shape (n, 3).

    The first sample is the state reached after discarding the transient
    steps. Divergence to a non-finite state raises with the step index.
    """
    state = np.asarray(params.initial, dtype=float)
    if state.shape != (3,):
        raise ValueError("initial state must have 3 components")
    dt = params.dt
    out = np.empty((params.n, 3))
    total = params.transient + params.n
    for step in range(total):
        if step >= params.transient:
            out[step - params.transient] = state
        k1 = _lorenz_field(state, params.sigma, params.rho, params.beta)
        k2 = _lorenz_field(state + 0.5 * dt * k1, params.sigma, params.rho, params.beta)
        k3 = _lorenz_field(state + 0.5 * dt * k2, params.sigma, params.rho, params.beta)
        k4 = _lorenz_field(state + dt * k3, params.sigma, params.rho, params.beta)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise FloatingPointError(f"trajectory diverged at step {step}")
    return out


def date_axis(n: int, start: datetime.date = datetime.date(2000, 1, 1)) -> tuple[datetime.date, ...]:
    """n consecutive calendar days, the date axis for generated series."""
    return tuple(start + datetime.timedelta(days=i) for i in range(n))
