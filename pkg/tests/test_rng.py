import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localsgd import RngStream, gaussian_draw, worker_gauss, worker_integers
from localsgd.rng import worker_iter_gauss, worker_iter_integers


def test_zero_variance_returns_mean_exactly():
    s = RngStream(seed=1)
    assert gaussian_draw(s, 3.5, 0.0) == 3.5


def test_negative_variance_rejected():
    with pytest.raises(ValueError):
        gaussian_draw(RngStream(seed=1), 0.0, -1.0)


def test_repeat_call_is_identical():
    s = RngStream(seed=1, replication=0, worker=0, iteration=0)
    assert gaussian_draw(s, 0.0, 4.0) == gaussian_draw(s, 0.0, 4.0)


def test_moments_of_n0_4():
    z = RngStream(seed=123).gauss(0.0, 4.0, n=100_000)
    assert abs(z.mean()) < 0.05
    assert abs(z.var() - 4.0) < 0.15


def test_streams_at_distinct_coordinates_uncorrelated():
    a = worker_gauss(7, 0, 0, 1, 100_000)[0]
    b = worker_gauss(7, 0, 1, 1, 100_000)[0]
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


@given(seed=st.integers(min_value=0, max_value=2**63),
       rep=st.integers(min_value=0, max_value=10**6),
       worker=st.integers(min_value=0, max_value=10**4),
       it=st.integers(min_value=0, max_value=10**7))
@settings(max_examples=50, deadline=None)
def test_draws_are_pure_functions_of_coordinates(seed, rep, worker, it):
    s1 = RngStream(seed, rep, worker, it)
    s2 = RngStream(seed, rep, worker, it)
    assert np.array_equal(s1.gauss(0, 1, 8), s2.gauss(0, 1, 8))
    assert s1.integers(1000, 4).tolist() == s2.integers(1000, 4).tolist()


@given(which=st.integers(min_value=0, max_value=3))
@settings(max_examples=20, deadline=None)
def test_perturbing_any_coordinate_changes_draws(which):
    base = (5, 3, 2, 11)
    bumped = tuple(v + (1 if i == which else 0) for i, v in enumerate(base))
    assert RngStream(*base).gauss(0, 1, 4).tolist() != RngStream(*bumped).gauss(0, 1, 4).tolist()


def test_worker_batch_matches_scalar_streams():
    block = worker_gauss(42, 3, 17, 8, 5)
    for w in range(8):
        assert np.array_equal(block[w], RngStream(42, 3, w, 17).gauss(0, 1, 5))


def test_iteration_block_matches_per_iteration_draws():
    block = worker_iter_gauss(42, 3, 6, 30, 4)
    for t in range(30):
        assert np.array_equal(block[:, t, :], worker_gauss(42, 3, t, 6, 4))


def test_integer_blocks_match_and_stay_in_range():
    block = worker_iter_integers(9, 1, 5, 20, 37, 3)
    assert block.min() >= 0 and block.max() < 37
    for t in range(20):
        assert np.array_equal(block[:, t, :], worker_integers(9, 1, t, 5, 37, 3))


def test_offset_continues_the_same_stream():
    s = RngStream(seed=8, replication=2)
    whole = s.gauss(0, 1, 10)
    assert np.array_equal(whole[4:], s.gauss(0, 1, 6, offset=4))


def test_at_returns_new_value_without_mutation():
    s = RngStream(seed=1, worker=0)
    s2 = s.at(worker=3, iteration=9)
    assert (s.worker, s.iteration) == (0, 0)
    assert (s2.worker, s2.iteration) == (3, 9)
