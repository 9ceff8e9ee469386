import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_profile, naive_recurrence, naive_twins
from recurconnect.recurrence import (
    RecurrenceConfig,
    TauRecurrenceProfile,
    _tau_profile_scalar,
    find_twins,
    recurrence_matrix,
    tau_recurrence_rate,
    write_pbm,
)


def test_three_point_example():
    # brute-force pairwise distances: only |0 - 0.05| <= 0.1
    m = recurrence_matrix([0.0, 1.0, 0.05], RecurrenceConfig(0.1))
    assert m.dense().astype(int).tolist() == [[1, 0, 1], [0, 1, 0], [1, 0, 1]]


def test_constant_series_saturates():
    m = recurrence_matrix([2.0] * 5, RecurrenceConfig(1e-9))
    assert m.dense().all()


def test_threshold_at_max_distance_saturates():
    values = [0.0, 3.0, -1.0, 2.0]
    m = recurrence_matrix(values, RecurrenceConfig(4.0))  # max distance is 4
    assert m.dense().all()


def test_boundary_distance_counts_as_recurrent():
    m = recurrence_matrix([0.0, 0.1], RecurrenceConfig(0.1))
    assert m.dense().all()


def test_config_validation():
    with pytest.raises(ValueError, match="positive"):
        RecurrenceConfig(0.0)
    with pytest.raises(ValueError, match="norm"):
        RecurrenceConfig(0.1, "manhattan")
    with pytest.raises(ValueError, match="scalar"):
        recurrence_matrix(np.zeros((4, 2)), RecurrenceConfig(0.1, "absolute"))
    with pytest.raises(ValueError, match="at least 2"):
        recurrence_matrix([1.0], RecurrenceConfig(0.1))


def test_vector_norms_differ():
    points = np.array([[0.0, 0.0], [0.6, 0.6], [2.0, 0.0]])
    # euclidean distance 0->1 is 0.849, maximum norm distance is 0.6
    eu = recurrence_matrix(points, RecurrenceConfig(0.7, "euclidean"))
    mx = recurrence_matrix(points, RecurrenceConfig(0.7, "maximum"))
    assert not eu.dense()[0, 1]
    assert mx.dense()[0, 1]


def test_profile_on_three_point_example():
    m = recurrence_matrix([0.0, 1.0, 0.05], RecurrenceConfig(0.1))
    p = tau_recurrence_rate(m)
    # direct diagonal sums: (R12 + R23)/2 and R13/1
    assert p.p.tolist() == [1.0, 0.0, 1.0]


def test_profile_always_one_at_zero_and_saturated():
    rng = np.random.default_rng(0)
    m = recurrence_matrix(rng.random(30), RecurrenceConfig(0.2))
    assert tau_recurrence_rate(m).p[0] == 1.0
    sat = recurrence_matrix([1.0] * 10, RecurrenceConfig(0.5))
    assert np.all(tau_recurrence_rate(sat).p == 1.0)


def test_profile_tau_max_validation():
    m = recurrence_matrix([0.0, 1.0, 2.0], RecurrenceConfig(0.1))
    with pytest.raises(ValueError, match="tau_max"):
        tau_recurrence_rate(m, 3)
    with pytest.raises(ValueError, match="tau_max"):
        tau_recurrence_rate(m, 0)


def test_profile_type_invariants():
    with pytest.raises(ValueError, match="p\\(0\\)"):
        TauRecurrenceProfile(np.array([0.5, 0.2]), 1)
    with pytest.raises(ValueError, match="lie in"):
        TauRecurrenceProfile(np.array([1.0, 1.2]), 1)


def test_twins_all_ones_single_class():
    m = recurrence_matrix([0.0] * 6, RecurrenceConfig(0.5))
    twins = find_twins(m)
    assert len(twins.classes) == 1
    assert twins.classes[0] == tuple(range(6))


def test_twins_distinct_columns_all_singletons():
    m = recurrence_matrix([0.0, 10.0, 20.0, 30.0], RecurrenceConfig(0.1))
    twins = find_twins(m)
    assert all(len(c) == 1 for c in twins.classes)
    assert twins.twin_count() == 0


def test_twins_two_close_points():
    # brute-force column comparison of the 3x3 matrix
    m = recurrence_matrix([0.0, 0.0, 1.0], RecurrenceConfig(0.1))
    twins = find_twins(m)
    groups = {frozenset(c) for c in twins.classes}
    assert groups == {frozenset({0, 1}), frozenset({2})}
    assert twins.members(0) == (0, 1)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_matrix_symmetric_unit_diagonal(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    if rng.random() < 0.5:
        points = rng.standard_normal(n)
        norm = "absolute"
    else:
        points = rng.standard_normal((n, int(rng.integers(2, 4))))
        norm = "euclidean" if rng.random() < 0.5 else "maximum"
    eps = float(rng.uniform(0.05, 2.0))
    dense = recurrence_matrix(points, RecurrenceConfig(eps, norm)).dense()
    assert np.array_equal(dense, dense.T)
    assert dense.diagonal().all()


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_epsilon_monotonicity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 50))
    points = rng.standard_normal(n)
    e1, e2 = sorted(rng.uniform(0.01, 2.0, size=2))
    m1 = recurrence_matrix(points, RecurrenceConfig(e1)).dense()
    m2 = recurrence_matrix(points, RecurrenceConfig(e2)).dense()
    assert (m1 <= m2).all()
    p1 = tau_recurrence_rate(recurrence_matrix(points, RecurrenceConfig(e1))).p
    p2 = tau_recurrence_rate(recurrence_matrix(points, RecurrenceConfig(e2))).p
    assert (p1 <= p2).all()


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_oracle_equivalence_small(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 24))
    points = rng.standard_normal(n)
    eps = float(rng.uniform(0.1, 1.5))
    m = recurrence_matrix(points, RecurrenceConfig(eps))
    ref = naive_recurrence(points.tolist(), eps, "absolute")
    assert m.dense().astype(int).tolist() == ref
    assert tau_recurrence_rate(m).p.tolist() == naive_profile(ref, n - 1)
    ours = {frozenset(c) for c in find_twins(m).classes}
    assert ours == {frozenset(c) for c in naive_twins(ref)}


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_twin_relation_is_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 30))
    # coarse grid makes twins common
    points = np.round(rng.standard_normal(n), 1)
    twins = find_twins(recurrence_matrix(points, RecurrenceConfig(0.3)))
    seen = set()
    for ci, members in enumerate(twins.classes):
        for idx in members:
            assert idx not in seen
            seen.add(idx)
            assert twins.class_of[idx] == ci
    assert seen == set(range(n))


def test_scalar_fast_path_matches_matrix_route():
    rng = np.random.default_rng(33)
    values = rng.standard_normal(120)
    m = recurrence_matrix(values, RecurrenceConfig(0.15))
    via_matrix = tau_recurrence_rate(m, 80).p
    direct = _tau_profile_scalar(values, 0.15, 80)
    assert np.array_equal(via_matrix, direct)


def test_pbm_export(tmp_path):
    m = recurrence_matrix([0.0, 1.0, 0.05], RecurrenceConfig(0.1))
    path = tmp_path / "rp.pbm"
    write_pbm(m, path)
    text = path.read_text().splitlines()
    assert text[0] == "P1"
    assert text[1] == "3 3"
    # top raster row is the last point index
    assert text[2:] == ["101", "010", "101"]
