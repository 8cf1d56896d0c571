import numpy as np
import pytest

from localsgd import (DivergenceError, PiecewiseQuadratic1D,
                      QuadraticStrongGrowth, RngStream, RunConfig,
                      SpeedupCell, constant_steps, estimate_expected_error,
                      family_schedule, fixed_schedule, growing_schedule,
                      inverse_t_steps, one_shot, run_local_sgd, speedup_curve,
                      worker_mean)
from localsgd.simulator import clamp_rounds, default_trace_stride

QUAD = QuadraticStrongGrowth(3, c1=0.5, c2=0.25)
STEPS = inverse_t_steps(1.0, 9.0)
X0 = np.array([1.0, -0.5, 0.25])


def run(schedule, N, T=50, objective=QUAD, steps=STEPS, x0=X0, seed=7, rep=0,
        stride=None):
    return run_local_sgd(objective, schedule, steps, N, T, x0,
                         RngStream(seed, rep), trace_stride=stride)


# ---------------------------------------------------------------- worker_mean

def test_worker_mean_of_identical_rows_is_exact():
    row = np.array([0.1, 0.2, 0.3])
    X = np.tile(row, (7, 1))
    assert np.array_equal(worker_mean(X), row)


def test_worker_mean_matches_numpy_mean():
    X = np.random.default_rng(0).normal(size=(5, 3))
    assert np.allclose(worker_mean(X), X.mean(axis=0), rtol=1e-14)


def test_default_trace_stride():
    assert default_trace_stride(100) == 1
    assert default_trace_stride(10_000) == 1
    assert default_trace_stride(25_000) == 3


# ---------------------------------------------------------------- one replication

def test_trace_starts_at_zero_and_ends_at_horizon():
    r = run(fixed_schedule(50, 10), N=4, stride=7)
    assert r.trace_ts[0] == 0 and r.trace_ts[-1] == 50
    assert r.error_trace.shape == r.trace_ts.shape
    assert r.error_trace[0] == QUAD.value(X0) - QUAD.constants.f_star


def test_final_errors_consistent_with_final_average():
    r = run(growing_schedule(50, 5), N=4)
    assert r.final_error_f == QUAD.value(r.final_avg)
    assert r.final_error_sq == pytest.approx(np.sum(r.final_avg**2), rel=1e-15)


def test_replication_is_deterministic():
    a = run(fixed_schedule(50, 5), N=4)
    b = run(fixed_schedule(50, 5), N=4)
    assert np.array_equal(a.error_trace, b.error_trace)
    assert np.array_equal(a.final_avg, b.final_avg)


def test_different_replications_differ():
    a = run(fixed_schedule(50, 5), N=4, rep=0)
    b = run(fixed_schedule(50, 5), N=4, rep=1)
    assert not np.array_equal(a.final_avg, b.final_avg)


def test_schedule_horizon_must_match():
    with pytest.raises(ValueError):
        run(fixed_schedule(40, 5), N=4, T=50)


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_divergence_reports_iteration():
    # eta = 2 on a 1-d quadratic with L = 2: |x_{t+1}| = 3 |x_t|, overflows
    obj = QuadraticStrongGrowth(1, c1=0.0, c2=0.0)
    with pytest.raises(DivergenceError) as exc:
        run_local_sgd(obj, one_shot(2000), constant_steps(1e6), 1, 2000,
                      [1.0], RngStream(0, 3))
    assert exc.value.t >= 1
    assert exc.value.replication == 3


# ------------------------------------------------------- equivalence oracles

def single_chain_averaged_sgd(objective, steps, N, T, x0, stream_base):
    """Oracle: one chain stepped with the across-worker average gradient."""
    x = np.asarray(x0, dtype=float)
    seed, rep = stream_base.seed, stream_base.replication
    for t in range(T):
        X = np.tile(x, (N, 1))
        G = objective.stochastic_gradients(X, seed, rep, t)
        stepped = X - steps.step_size(t) * G
        x = worker_mean(stepped)
    return x


def test_synchronized_equals_single_chain_averaged_gradients():
    N, T = 8, 60
    r = run(fixed_schedule(T, 1), N=N, T=T)
    oracle = single_chain_averaged_sgd(QUAD, STEPS, N, T, X0, RngStream(7, 0))
    assert np.array_equal(r.final_avg, oracle)


@pytest.mark.parametrize("schedule_b", [
    fixed_schedule(50, 10), growing_schedule(50, 5), one_shot(50)])
def test_single_worker_trajectory_is_schedule_independent(schedule_b):
    a = run(fixed_schedule(50, 1), N=1)
    b = run(schedule_b, N=1)
    assert np.array_equal(a.final_avg, b.final_avg)
    assert np.array_equal(a.error_trace, b.error_trace)


@pytest.mark.parametrize("schedule_b,N_b", [
    (fixed_schedule(50, 10), 6), (growing_schedule(50, 5), 3), (one_shot(50), 1)])
def test_zero_noise_trajectory_ignores_schedule_and_n(schedule_b, N_b):
    obj = QuadraticStrongGrowth(3, c1=0.0, c2=0.0)
    a = run(fixed_schedule(50, 1), N=4, objective=obj)
    b = run(schedule_b, N=N_b, objective=obj)
    assert np.array_equal(a.final_avg, b.final_avg)
    assert np.array_equal(a.error_trace, b.error_trace)


def test_block_sampler_matches_per_iteration_sampling():
    class NoBlock:
        """Same objective without the pre-drawn-noise fast path."""

        def __init__(self, inner):
            self._inner = inner
            self.constants = inner.constants
            self.value = inner.value
            self.stochastic_gradients = inner.stochastic_gradients

    a = run(growing_schedule(50, 5), N=4)
    b = run_local_sgd(NoBlock(QUAD), growing_schedule(50, 5), STEPS, 4, 50,
                      X0, RngStream(7, 0))
    assert np.array_equal(a.final_avg, b.final_avg)
    assert np.array_equal(a.error_trace, b.error_trace)


# ---------------------------------------------------------------- aggregation

def make_config(schedule, N=4, T=50, replications=6, seed=11):
    return RunConfig(objective=QUAD, schedule=schedule, steps=STEPS, N=N, T=T,
                     x0=X0, replications=replications, seed=seed)


def test_estimate_matches_manual_replication_loop():
    cfg = make_config(fixed_schedule(50, 10))
    rec = estimate_expected_error(cfg)
    finals = [run(fixed_schedule(50, 10), N=4, seed=11, rep=r).final_error_f
              for r in range(6)]
    assert rec.final_mean_f == np.mean(finals)
    assert rec.final_std_f == pytest.approx(np.std(finals), rel=1e-12)
    assert rec.replications == 6
    assert rec.wall_ms > 0


def test_parallel_jobs_do_not_change_results():
    cfg = make_config(growing_schedule(50, 5))
    serial = estimate_expected_error(cfg, n_jobs=1)
    parallel = estimate_expected_error(cfg, n_jobs=2)
    assert serial.final_mean_f == parallel.final_mean_f
    assert np.array_equal(serial.trace_mean, parallel.trace_mean)


# ---------------------------------------------------------------- speed-up

def test_clamp_rounds():
    assert clamp_rounds(0, 1000) == 1
    assert clamp_rounds(20, 1000) == 20
    assert clamp_rounds(100, 1000) == 44  # floor(sqrt(2000))


def test_family_schedule_shapes():
    assert family_schedule("synchronized", 100, 8).intervals() == [1] * 100
    assert family_schedule("one-shot", 100, 8).R == 1
    assert family_schedule("fixed-r-n", 100, 8).intervals()[0] == 12
    assert family_schedule("growing-r-n", 100, 8).R <= 9
    assert family_schedule("growing-r-n34", 100, 16).R <= 9  # round(16^0.75)=8
    with pytest.raises(ValueError):
        family_schedule("bogus", 100, 8)


def test_speedup_is_one_at_single_worker():
    obj = PiecewiseQuadratic1D(2.0)
    base = RunConfig(objective=obj, schedule=one_shot(40),
                     steps=inverse_t_steps(1.0, 9.0), N=1, T=40, x0=[1.0],
                     replications=5, seed=3)
    cells = speedup_curve(base, [1], ["one-shot"])
    assert len(cells) == 1
    assert cells[0].speedup == 1.0
    assert cells[0].speedup_std >= 0.0


def test_speedup_grid_covers_all_cells():
    obj = PiecewiseQuadratic1D(2.0)
    base = RunConfig(objective=obj, schedule=one_shot(40),
                     steps=inverse_t_steps(1.0, 9.0), N=1, T=40, x0=[1.0],
                     replications=5, seed=3)
    cells = speedup_curve(base, [1, 2], ["synchronized", "one-shot"])
    assert [(c.family, c.N) for c in cells] == [
        ("synchronized", 1), ("synchronized", 2),
        ("one-shot", 1), ("one-shot", 2)]
    assert all(isinstance(c, SpeedupCell) and np.isfinite(c.speedup) for c in cells)


def test_speedup_saturation_flag():
    # noiseless run from the optimum: error is exactly zero => saturated
    obj = QuadraticStrongGrowth(1, c1=0.0, c2=0.0)
    base = RunConfig(objective=obj, schedule=one_shot(10),
                     steps=constant_steps(0.5), N=1, T=10, x0=[0.0],
                     replications=2, seed=0)
    cells = speedup_curve(base, [2], ["synchronized"])
    assert cells[0].saturated
