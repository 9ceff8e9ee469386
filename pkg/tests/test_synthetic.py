import datetime

import numpy as np
import pytest

from recurconnect.preprocess import normalize
from recurconnect.recurrence import RecurrenceConfig, recurrence_matrix, tau_recurrence_rate
from recurconnect.synthetic import LorenzParams, date_axis, lorenz, white_noise


def test_white_noise_rejects_zero_length():
    with pytest.raises(ValueError):
        white_noise(0, seed=1)


def test_white_noise_deterministic():
    assert np.array_equal(white_noise(100, seed=5), white_noise(100, seed=5))


def test_white_noise_moments():
    values = white_noise(100_000, seed=17)
    assert values.mean() == pytest.approx(0.5, abs=0.01)
    assert values.var() == pytest.approx(1.0 / 12.0, abs=0.002)
    assert values.min() >= 0.0 and values.max() < 1.0


def test_lorenz_param_validation():
    with pytest.raises(ValueError):
        LorenzParams(dt=0.0)
    with pytest.raises(ValueError):
        LorenzParams(n=0)
    assert LorenzParams.classic().beta == pytest.approx(8.0 / 3.0)
    assert LorenzParams().beta == pytest.approx(10.0 / 3.0)


def test_lorenz_sigma_zero_freezes_x():
    # dx/dt = sigma*(y - x) vanishes identically for sigma = 0
    params = LorenzParams(sigma=0.0, n=200, transient=0, initial=(2.0, 1.0, 1.0))
    trajectory = lorenz(params)
    assert np.all(trajectory[:, 0] == 2.0)


def test_lorenz_bounded_on_attractor():
    # bound verified against a dt=0.001 oracle integration (|z| < 46.2)
    trajectory = lorenz(LorenzParams(dt=0.01, n=5000))
    assert np.isfinite(trajectory).all()
    assert np.abs(trajectory[:, 2]).max() < 60.0


def test_lorenz_divergence_reports_step():
    bad = LorenzParams(dt=10.0, n=50, transient=0, initial=(10.0, 10.0, 10.0))
    with pytest.raises(FloatingPointError, match="step"):
        lorenz(bad)


def test_lorenz_rk4_fourth_order():
    # Richardson comparison on 0.5 time units against a dt=0.001 reference
    start = tuple(lorenz(LorenzParams(dt=0.01, n=1, transient=1000))[0])
    end_coarse = lorenz(LorenzParams(dt=0.01, n=51, transient=0, initial=start))[-1]
    end_half = lorenz(LorenzParams(dt=0.005, n=101, transient=0, initial=start))[-1]
    end_ref = lorenz(LorenzParams(dt=0.001, n=501, transient=0, initial=start))[-1]
    err_coarse = np.linalg.norm(end_coarse - end_ref)
    err_half = np.linalg.norm(end_half - end_ref)
    assert 8.0 < err_coarse / err_half < 32.0


def test_white_noise_profile_is_flat():
    values = normalize(white_noise(2000, seed=123)).values
    profile = tau_recurrence_rate(
        recurrence_matrix(values, RecurrenceConfig(0.1)), 500
    ).p
    segment = profile[1:]
    assert segment.std() / segment.mean() < 0.2


def _local_maxima(profile, min_separation=30, guard=5):
    peaks = []
    for t in range(guard, len(profile) - guard):
        lo = max(0, t - min_separation)
        hi = min(len(profile), t + min_separation + 1)
        if profile[t] == profile[lo:hi].max() and profile[t] > 0:
            if not peaks or t - peaks[-1] > min_separation:
                peaks.append(t)
    return peaks


def test_lorenz_profile_has_periodic_decaying_peaks():
    trajectory = lorenz(LorenzParams(n=2000))
    scaled = np.stack([normalize(trajectory[:, k]).values for k in range(3)], axis=1)
    matrix = recurrence_matrix(scaled, RecurrenceConfig(0.3, "euclidean"))
    profile = tau_recurrence_rate(matrix, 500).p
    peaks = _local_maxima(profile)
    assert len(peaks) >= 4
    spacings = np.diff(peaks)
    assert spacings.std() / spacings.mean() < 0.15
    heights = profile[peaks[:5]]
    assert np.all(np.diff(heights) < 0)


def test_date_axis_consecutive_days():
    axis = date_axis(4)
    assert axis[0] == datetime.date(2000, 1, 1)
    assert all((b - a).days == 1 for a, b in zip(axis, axis[1:]))
