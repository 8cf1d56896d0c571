import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localsgd import (BoundInputs, ProblemConstants, bound_fixed_interval,
                      bound_general, bound_osa_leading, bound_theorem1,
                      fixed_schedule, growing_schedule, interval_sum, one_shot)


import numpy as np


def make_inputs(mu=1.0, L=1.0, sigma2=1.0, c=0.0, N=10, T=1000, R=10,
                beta=9.0, xi0=1.0, schedule=None):
    constants = ProblemConstants(mu=mu, L=L, c=c, sigma2=sigma2,
                                 f_star=0.0, x_star=np.zeros(1))
    return BoundInputs(constants, N=N, T=T, R=R, beta=beta, xi0=xi0,
                       schedule=schedule)


# ---------------------------------------------------------------- theorem1

def test_theorem1_reference_value():
    # 81/10^6 + 9/(2*10*1000) + 144/(10*1000)
    assert bound_theorem1(make_inputs()) == pytest.approx(0.0149310, rel=1e-6)


def test_theorem1_noiseless_from_optimum_is_zero():
    assert bound_theorem1(make_inputs(sigma2=0.0, xi0=0.0)) == 0.0


def test_theorem1_doubling_n_shrinks_only_middle_term():
    lo = bound_theorem1(make_inputs(N=10))
    hi = bound_theorem1(make_inputs(N=20))
    middle = 9.0 * 1.0 * 1.0 / (2.0 * 1.0 * 10 * 1000)
    assert lo - hi == pytest.approx(middle / 2, rel=1e-12)


def test_theorem1_rejects_oversized_r():
    with pytest.raises(ValueError):
        bound_theorem1(make_inputs(T=100, R=15))  # floor(sqrt(200)) = 14


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        make_inputs(xi0=-1.0)
    with pytest.raises(ValueError):
        make_inputs(beta=0.0)
    with pytest.raises(ValueError):
        make_inputs(N=0)


# ---------------------------------------------------------------- interval sum

def test_interval_sum_synchronized_is_zero():
    # t == tau(t) at every step when H = 1
    assert interval_sum(fixed_schedule(50, 1), beta=9.0) == 0.0


def test_interval_sum_one_shot_matches_direct_summation():
    # oracle: sum_{t=0}^{99} t/(t+9)
    direct = sum(t / (t + 9.0) for t in range(100))
    assert interval_sum(one_shot(100), beta=9.0) == pytest.approx(direct, rel=1e-15)
    assert direct == pytest.approx(77.08499, abs=1e-5)


def test_interval_sum_splits_over_intervals():
    s = fixed_schedule(10, 4)
    direct = sum((t - s.tau_of(t)) / (t + 2.0) for t in range(10))
    assert interval_sum(s, beta=2.0) == pytest.approx(direct, rel=1e-15)


@given(T=st.integers(min_value=1, max_value=300),
       beta=st.floats(min_value=1.5, max_value=50.0),
       data=st.data())
@settings(max_examples=50, deadline=None)
def test_interval_sum_matches_brute_force(T, beta, data):
    H = data.draw(st.integers(min_value=1, max_value=T))
    s = fixed_schedule(T, H)
    brute = sum((t - s.tau_of(t)) / (t + beta) for t in range(T))
    assert interval_sum(s, beta) == pytest.approx(brute, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- general

def test_general_reduces_to_first_two_terms_when_synchronized():
    s = fixed_schedule(1000, 1)
    b = make_inputs(schedule=s, beta=9.0)
    g = bound_general(b)
    first_two = 81.0 / 10**6 + 9.0 / (2 * 10 * 1000)
    assert g.value == pytest.approx(first_two, rel=1e-12)
    assert g.condition_holds  # beta=9 >= 3k(1+c/N)=3 and no log term


def test_general_requires_matching_schedule():
    with pytest.raises(ValueError):
        bound_general(make_inputs(schedule=None))
    with pytest.raises(ValueError):
        bound_general(make_inputs(T=1000, schedule=one_shot(500)))


def test_general_flags_violated_condition_but_still_scores():
    # kappa=4, c=1: beta=1 is far below the per-interval requirement
    s = growing_schedule(1000, 10)
    b = make_inputs(mu=1.0, L=4.0, c=1.0, schedule=s, beta=1.0)
    g = bound_general(b)
    assert not g.condition_holds
    assert g.value > 0


def test_general_monotone_in_schedule_sparsity():
    # fewer averaging events => larger drift sum => larger bound
    dense = bound_general(make_inputs(schedule=fixed_schedule(1000, 10))).value
    sparse = bound_general(make_inputs(schedule=fixed_schedule(1000, 100))).value
    assert sparse > dense


# ---------------------------------------------------------------- fixed interval

def test_fixed_interval_reference_value():
    # mu=L=1, s2=1, N=1, T=100, beta=10, xi0=0, H=10:
    # 9/200 + 18*9*ln(1 + 100/9)/10^4
    b = make_inputs(N=1, T=100, R=1, beta=10.0, xi0=0.0)
    expected = 9.0 / 200.0 + 18 * 9 * math.log(1 + 100.0 / 9.0) / 1e4
    assert bound_fixed_interval(b, 10) == pytest.approx(expected, rel=1e-12)
    assert bound_fixed_interval(b, 10) == pytest.approx(0.08538, abs=1e-4)


def test_fixed_interval_dominates_general_on_matching_schedule():
    for H in (2, 5, 10, 25, 50):
        for beta in (2.0, 9.0, 30.0):
            b = make_inputs(beta=beta, schedule=fixed_schedule(1000, H))
            assert bound_fixed_interval(b, H) >= bound_general(b).value


def test_fixed_interval_h1_equals_theorem1_without_r_term():
    b = make_inputs()
    r_term = 144.0 / (10 * 1000)
    assert bound_fixed_interval(b, 1) == pytest.approx(
        bound_theorem1(b) - r_term, rel=1e-12)


def test_fixed_interval_requires_beta_above_one():
    with pytest.raises(ValueError):
        bound_fixed_interval(make_inputs(beta=1.0), 10)
    with pytest.raises(ValueError):
        bound_fixed_interval(make_inputs(), 0)


# ---------------------------------------------------------------- one-shot

def test_osa_reference_value():
    b = make_inputs(mu=1.0, L=1.0, sigma2=64.0, N=4, T=1000)
    assert bound_osa_leading(b) == pytest.approx(0.0213333, rel=1e-5)


def test_osa_requires_horizon_past_transient():
    b = make_inputs(mu=1.0, L=100.0, T=150, R=10)
    with pytest.raises(ValueError):
        bound_osa_leading(b)  # t0 = 200 > T


def test_osa_scales_inversely_with_n_and_t():
    base = bound_osa_leading(make_inputs(N=4, T=1000))
    assert bound_osa_leading(make_inputs(N=8, T=1000)) == pytest.approx(base / 2)
    assert bound_osa_leading(make_inputs(N=4, T=2000)) == pytest.approx(base / 2)
