"""Local SGD simulator: communication schedules, noise-calibrated
objectives, replication-deterministic simulation, and closed-form bounds."""

from .bounds import (BoundInputs, GeneralBound, bound_fixed_interval,
                     bound_general, bound_osa_leading, bound_theorem1,
                     interval_sum)
from .harness import (ConfigError, StrategyResult, build_objective,
                      build_schedule, build_steps, build_x0, load_config,
                      run_experiment, run_speedup, write_run_outputs,
                      write_speedup_csv)
from .model import ProblemConstants, RunConfig, as_point
from .objectives import (Dataset, LibsvmParseError, LogisticL2,
                         PiecewiseQuadratic1D, QuadraticStrongGrowth,
                         parse_libsvm)
from .rng import RngStream, gaussian_draw, worker_gauss, worker_integers
from .schedules import (CommSchedule, StepSchedule, beta_min,
                        capped_inverse_t_steps, check_beta_condition,
                        constant_steps, fixed_schedule, growing_schedule,
                        inverse_t_steps, one_shot, step_size, theta_steps)
from .simulator import (DivergenceError, ExperimentRecord, RunResult,
                        SpeedupCell, estimate_expected_error, family_schedule,
                        run_local_sgd, speedup_curve, worker_mean)

__all__ = [
    "BoundInputs", "GeneralBound", "bound_fixed_interval", "bound_general",
    "bound_osa_leading", "bound_theorem1", "interval_sum",
    "ConfigError", "StrategyResult", "build_objective", "build_schedule",
    "build_steps", "build_x0", "load_config", "run_experiment", "run_speedup",
    "write_run_outputs", "write_speedup_csv",
    "ProblemConstants", "RunConfig", "as_point",
    "Dataset", "LibsvmParseError", "LogisticL2", "PiecewiseQuadratic1D",
    "QuadraticStrongGrowth", "parse_libsvm",
    "RngStream", "gaussian_draw", "worker_gauss", "worker_integers",
    "CommSchedule", "StepSchedule", "beta_min", "capped_inverse_t_steps",
    "check_beta_condition", "constant_steps", "fixed_schedule",
    "growing_schedule", "inverse_t_steps", "one_shot", "step_size",
    "theta_steps",
    "DivergenceError", "ExperimentRecord", "RunResult", "SpeedupCell",
    "estimate_expected_error", "family_schedule", "run_local_sgd",
    "speedup_curve", "worker_mean",
]
