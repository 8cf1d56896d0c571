"""Local SGD execution and replication aggregation.

One replication runs N workers for T iterations; whenever t+1 is a
communication time every worker is reset to the across-worker average of
the post-step iterates.  The error trace records f(xbar_t) - f* for the
across-worker mean, also between communications.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .model import RunConfig, as_point
from .rng import RngStream
from .schedules import (CommSchedule, StepSchedule, fixed_schedule,
                        growing_schedule, one_shot)

PARALLELISM_ENV = "LOCALSGD_WORKERS"

# guard for speed-up denominators: below this the ratio is meaningless
SATURATION_FLOOR = 1e-30


class DivergenceError(RuntimeError):
    """A worker iterate went non-finite at iteration t."""

    def __init__(self, t: int, replication: int | None = None):
        where = f"iteration {t}"
        if replication is not None:
            where += f", replication {replication}"
        super().__init__(f"non-finite iterate at {where}")
        self.t = t
        self.replication = replication


def worker_mean(X: np.ndarray) -> np.ndarray:
    """Across-worker mean with a fixed left-to-right summation order.

    Computed as x_0 + (sum_i (x_i - x_0))/N so that identical workers
    average to exactly their common value.
    """
    base = X[0]
    if X.shape[0] == 1:
        return base.copy()
    acc = X[1] - base
    for i in range(2, X.shape[0]):
        acc = acc + (X[i] - base)
    return base + acc / X.shape[0]


def default_trace_stride(T: int) -> int:
    return 1 if T <= 10_000 else -(-T // 10_000)


@dataclass(frozen=True)
class RunResult:
    """Per-replication outcome."""

    trace_ts: np.ndarray        # iteration indices where the trace was recorded
    error_trace: np.ndarray     # f(xbar_t) - f* at those indices
    final_avg: np.ndarray       # xbar_T
    final_error_f: float        # f(xbar_T) - f*
    final_error_sq: float       # ||xbar_T - x*||^2


def run_local_sgd(objective, schedule: CommSchedule, steps: StepSchedule,
                  N: int, T: int, x0, stream_base: RngStream,
                  trace_stride: int | None = None) -> RunResult:
    """One replication of Local SGD.

    stream_base fixes (seed, replication); per-step noise is keyed by
    (worker, iteration), so worker evaluation order cannot matter.
    """
    if schedule.T != T:
        raise ValueError(f"schedule horizon {schedule.T} != T={T}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    x0 = as_point(x0)
    stride = default_trace_stride(T) if trace_stride is None else trace_stride
    if stride < 1:
        raise ValueError(f"trace stride must be >= 1, got {stride}")

    constants = objective.constants
    f_star = constants.f_star
    comm = schedule.comm_set()
    seed, rep = stream_base.seed, stream_base.replication

    make_sampler = getattr(objective, "make_replication_sampler", None)
    if make_sampler is not None:
        sample = make_sampler(seed, rep, N, T)
    else:
        sample = lambda X, t: objective.stochastic_gradients(X, seed, rep, t)

    X = np.tile(x0, (N, 1))
    ts = [0]
    errors = [objective.value(worker_mean(X)) - f_star]
    for t in range(T):
        eta = steps.step_size(t)
        # overflow to inf is caught by the divergence check below
        with np.errstate(over="ignore", invalid="ignore"):
            X = X - eta * sample(X, t)
        if not np.all(np.isfinite(X)):
            raise DivergenceError(t + 1, rep)
        if t + 1 in comm:
            xbar = worker_mean(X)
            X = np.tile(xbar, (N, 1))
        if (t + 1) % stride == 0 or t + 1 == T:
            ts.append(t + 1)
            errors.append(objective.value(worker_mean(X)) - f_star)

    final_avg = worker_mean(X)
    return RunResult(
        trace_ts=np.asarray(ts, dtype=np.int64),
        error_trace=np.asarray(errors),
        final_avg=final_avg,
        final_error_f=objective.value(final_avg) - f_star,
        final_error_sq=float(np.sum((final_avg - constants.x_star) ** 2)),
    )


@dataclass(frozen=True)
class ExperimentRecord:
    """Mean/std across replications for one experiment cell."""

    config: RunConfig
    trace_ts: np.ndarray
    trace_mean: np.ndarray
    trace_std: np.ndarray
    final_mean_f: float
    final_std_f: float
    final_mean_sq: float
    final_std_sq: float
    replications: int
    wall_ms: float

    def final_mean(self, metric: str = "f") -> float:
        return self.final_mean_f if metric == "f" else self.final_mean_sq

    def final_std(self, metric: str = "f") -> float:
        return self.final_std_f if metric == "f" else self.final_std_sq


def _n_jobs() -> int:
    return max(1, int(os.environ.get(PARALLELISM_ENV, "1")))


def _run_replication(config: RunConfig, rep: int) -> RunResult:
    stream = RngStream(seed=config.seed, replication=rep)
    try:
        return run_local_sgd(config.objective, config.schedule, config.steps,
                             config.N, config.T, config.x0, stream,
                             config.trace_stride)
    except DivergenceError as exc:
        raise DivergenceError(exc.t, rep) from None


def estimate_expected_error(config: RunConfig, n_jobs: int | None = None) -> ExperimentRecord:
    """Run all replications (possibly in parallel) and aggregate.

    Results are independent of n_jobs because every draw is keyed by its
    (replication, worker, iteration) coordinates.
    """
    start = time.perf_counter()
    jobs = _n_jobs() if n_jobs is None else n_jobs
    reps = range(config.replications)
    if jobs > 1 and config.replications > 1:
        results = Parallel(n_jobs=jobs)(
            delayed(_run_replication)(config, r) for r in reps)
    else:
        results = [_run_replication(config, r) for r in reps]

    traces = np.stack([r.error_trace for r in results])
    finals_f = np.asarray([r.final_error_f for r in results])
    finals_sq = np.asarray([r.final_error_sq for r in results])
    wall_ms = (time.perf_counter() - start) * 1e3
    return ExperimentRecord(
        config=config,
        trace_ts=results[0].trace_ts,
        trace_mean=traces.mean(axis=0),
        trace_std=traces.std(axis=0),
        final_mean_f=float(finals_f.mean()),
        final_std_f=float(finals_f.std()),
        final_mean_sq=float(finals_sq.mean()),
        final_std_sq=float(finals_sq.std()),
        replications=config.replications,
        wall_ms=wall_ms,
    )


def clamp_rounds(R: int, T: int) -> int:
    return min(max(1, R), math.isqrt(2 * T))


SCHEDULE_FAMILIES = ("synchronized", "growing-r-n", "fixed-r-n",
                     "growing-r-n34", "growing-r-n12", "one-shot")


def family_schedule(family: str, T: int, N: int) -> CommSchedule:
    """Communication schedule for one (family, N) cell of a speed-up curve."""
    if family == "synchronized":
        return fixed_schedule(T, 1)
    if family == "growing-r-n":
        return growing_schedule(T, clamp_rounds(N, T))
    if family == "fixed-r-n":
        return fixed_schedule(T, max(1, round(T / N)))
    if family == "growing-r-n34":
        return growing_schedule(T, clamp_rounds(round(N ** 0.75), T))
    if family == "growing-r-n12":
        return growing_schedule(T, clamp_rounds(round(N ** 0.5), T))
    if family == "one-shot":
        return one_shot(T)
    raise ValueError(f"unknown schedule family {family!r}; expected one of {SCHEDULE_FAMILIES}")


@dataclass(frozen=True)
class SpeedupCell:
    family: str
    N: int
    R_effective: int
    speedup: float
    speedup_std: float
    saturated: bool = False


def speedup_curve(base_config: RunConfig, Ns, families, metric: str = "f",
                  n_jobs: int | None = None) -> list[SpeedupCell]:
    """Speed-up = E_err(single-worker SGD) / E_err(family at N workers).

    The single-worker baseline uses the same seed and replication set, so
    any family at N=1 has speed-up exactly 1.
    """
    if not Ns:
        raise ValueError("Ns must be nonempty")
    if metric not in ("f", "sq"):
        raise ValueError(f"metric must be 'f' or 'sq', got {metric!r}")
    from dataclasses import replace

    T = base_config.T
    baseline_cfg = replace(base_config, N=1, schedule=one_shot(T), T=T)
    baseline = estimate_expected_error(baseline_cfg, n_jobs=n_jobs)
    m0 = baseline.final_mean(metric)
    s0 = baseline.final_std(metric)
    n_reps = base_config.replications

    cells = []
    for family in families:
        for N in Ns:
            schedule = family_schedule(family, T, N)
            cfg = replace(base_config, N=N, schedule=schedule)
            rec = estimate_expected_error(cfg, n_jobs=n_jobs)
            m1 = rec.final_mean(metric)
            s1 = rec.final_std(metric)
            if m1 < SATURATION_FLOOR:
                cells.append(SpeedupCell(family, N, schedule.R,
                                         float("inf"), float("nan"), True))
                continue
            ratio = m0 / m1
            # delta-method standard error of the ratio of means
            rel_var = 0.0
            if m0 > 0:
                rel_var += (s0 / m0) ** 2 / n_reps
            rel_var += (s1 / m1) ** 2 / n_reps
            cells.append(SpeedupCell(family, N, schedule.R,
                                     ratio, ratio * math.sqrt(rel_var)))
    return cells
