import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavloc.errors import ShapeError
from uavloc.metrics import TrackError, mean_localization_error, si_from_errors, similarity_index


def test_si_examples():
    assert si_from_errors([1, 2, 3]) == pytest.approx(6 / 7, rel=1e-15)
    assert si_from_errors([4.0] * 9) == pytest.approx(1.0)
    assert si_from_errors([0, 0, 5, 0]) == pytest.approx(1 / 4)
    assert si_from_errors(np.zeros(5)) == 1.0


def test_mean_error_examples():
    truth = np.zeros((2, 2))
    assert mean_localization_error(truth, truth) == 0.0
    assert mean_localization_error(truth, truth + [6, 8]) == pytest.approx(10.0)
    assert mean_localization_error(truth, np.array([[0, 0], [10, 0]])) == pytest.approx(5.0)


def test_similarity_index_from_tracks():
    truth = np.zeros((3, 2))
    est = np.array([[1, 0], [0, 2], [3, 0]], dtype=float)
    assert similarity_index(truth, est) == pytest.approx(6 / 7)


def test_track_error_consistent():
    rng = np.random.default_rng(0)
    truth, est = rng.normal(size=(20, 2)), rng.normal(size=(20, 2))
    te = TrackError.compute(truth, est)
    assert te.mean == pytest.approx(te.per_spot_errors.mean())
    assert te.si == pytest.approx(si_from_errors(te.per_spot_errors))


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        mean_localization_error(np.zeros((3, 2)), np.zeros((4, 2)))


def test_si_bounds_random():
    rng = np.random.default_rng(3)
    e = rng.exponential(size=(100_000, 12)) * (rng.random((100_000, 12)) < 0.7)
    e[e.sum(axis=1) == 0, 0] = 1.0
    si = e.sum(axis=1) ** 2 / (12 * (e ** 2).sum(axis=1))
    assert si.min() >= 1 / 12 - 1e-12 and si.max() <= 1 + 1e-12


errors = st.lists(st.floats(0, 1e6), min_size=1, max_size=50).filter(lambda v: sum(v) > 0)


@given(errors, st.floats(1e-3, 1e3))
def test_si_scale_invariant(e, c):
    assert si_from_errors(np.array(e) * c) == pytest.approx(si_from_errors(e), rel=1e-12)


@given(errors, st.randoms())
def test_si_permutation_invariant(e, r):
    shuffled = list(e)
    r.shuffle(shuffled)
    assert si_from_errors(shuffled) == pytest.approx(si_from_errors(e), rel=1e-12)


@given(errors)
def test_si_bounds(e):
    si = si_from_errors(e)
    assert 1 / len(e) - 1e-12 <= si <= 1 + 1e-12
