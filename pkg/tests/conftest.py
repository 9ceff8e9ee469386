"""Shared fixtures and generators for the test suite."""

import datetime

import numpy as np


def ar1(n, phi, rng, stationary_start=True):
    """AR(1) sample path with unit-variance innovations."""
    e = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = e[0] / np.sqrt(1.0 - phi * phi) if stationary_start else e[0]
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return x


def znorm(values):
    values = np.asarray(values, dtype=float)
    return (values - values.mean()) / values.std()


def business_days(n, start=datetime.date(2000, 1, 3)):
    """n consecutive weekdays (no holidays)."""
    out = []
    day = start
    while len(out) < n:
        if day.weekday() < 5:
            out.append(day)
        day += datetime.timedelta(days=1)
    return tuple(out)


def random_gap_calendar(n, rng, p_skip=0.3):
    """Daily calendar with random gaps: each next date advances 1-4 days."""
    day = datetime.date(1995, 1, 1)
    out = [day]
    while len(out) < n:
        day += datetime.timedelta(days=int(1 + rng.integers(0, 4) * (rng.random() < p_skip)))
        if day != out[-1]:
            out.append(day)
    return tuple(out[:n])


def random_profile(tau_max, rng, head=None):
    """A recurrence profile: p[0] = 1, interior values in (0.2, 0.8)."""
    p = np.empty(tau_max + 1)
    p[0] = 1.0
    p[1:] = rng.uniform(0.2, 0.8, tau_max)
    if head is not None:
        p[1 : len(head) + 1] = head
    return p
