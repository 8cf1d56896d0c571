"""Config-driven experiment harness: JSON configs in, CSV records out.

CSV schemas (fixed, consumed by the figures front end):
  trace_<strategy>.csv   t,mean_error,std_error
  comms_<strategy>.csv   round,t
  summary.csv            strategy,R_effective,final_mean,final_std,wall_ms
  speedup CSV            family,N,R_effective,speedup,speedup_std
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .model import RunConfig
from .objectives import LogisticL2, PiecewiseQuadratic1D, QuadraticStrongGrowth, parse_libsvm
from .schedules import CommSchedule, StepSchedule, fixed_schedule, growing_schedule, one_shot
from .simulator import ExperimentRecord, estimate_expected_error, speedup_curve


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing key {key!r} in {where}")
    return mapping[key]


def build_objective(spec: dict, base_dir: Path):
    name = _require(spec, "name", "objective")
    if name == "quadratic":
        return QuadraticStrongGrowth(d=int(_require(spec, "d", "objective")),
                                     c1=float(spec.get("c1", 0.0)),
                                     c2=float(spec.get("c2", 0.0)))
    if name == "piecewise":
        return PiecewiseQuadratic1D(sigma=float(_require(spec, "sigma", "objective")))
    if name == "logistic":
        path = Path(_require(spec, "data", "objective"))
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"dataset file not found: {path}")
        dataset = parse_libsvm(path.read_text().splitlines(), d=spec.get("dim"))
        return LogisticL2(dataset, lam=float(_require(spec, "lambda", "objective")),
                          batch=int(spec.get("batch", 1)))
    raise ConfigError(f"unknown objective {name!r}")


def build_steps(spec: dict, objective) -> StepSchedule:
    kind = _require(spec, "kind", "steps")
    mu = float(spec.get("mu", objective.constants.mu))
    L = float(spec.get("L", objective.constants.L))
    return StepSchedule(kind, mu=mu, L=L,
                        beta=float(spec.get("beta", 1.0)),
                        eta=float(spec.get("eta", 0.0)))


def build_schedule(spec: dict, T: int, N: int) -> CommSchedule:
    """Schedule from a strategy spec; rule strings are rounded like the
    harness defaults (H = round(sqrt(TN)) etc.)."""
    kind = _require(spec, "type", "schedule")
    if kind == "one-shot":
        return one_shot(T)
    if kind == "fixed":
        if "H" in spec:
            H = int(spec["H"])
        else:
            rule = _require(spec, "H_rule", "schedule")
            if rule == "sqrt(T*N)":
                H = round(math.sqrt(T * N))
            elif rule == "cbrt(T*N)":
                H = round((T * N) ** (1.0 / 3.0))
            elif rule == "T/N":
                H = round(T / N)
            else:
                raise ConfigError(f"unknown H_rule {rule!r}")
        return fixed_schedule(T, max(1, min(H, T)))
    if kind == "growing":
        if "R" in spec:
            R = int(spec["R"])
        else:
            rule = _require(spec, "R_rule", "schedule")
            if rule != "N":
                raise ConfigError(f"unknown R_rule {rule!r}")
            R = N
        R = min(max(1, R), math.isqrt(2 * T))
        a = spec.get("a")
        return growing_schedule(T, R, a=None if a is None else int(a))
    raise ConfigError(f"unknown schedule type {kind!r}")


def build_x0(spec, objective) -> np.ndarray:
    d = objective.d
    if isinstance(spec, (int, float)):
        return np.full(d, float(spec))
    x0 = np.asarray(spec, dtype=np.float64)
    if x0.shape != (d,):
        raise ConfigError(f"x0 must have length {d}, got shape {x0.shape}")
    return x0


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    cfg["_base_dir"] = path.parent
    return cfg


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class StrategyResult:
    name: str
    schedule: CommSchedule
    record: ExperimentRecord


def run_experiment(cfg: dict, strategies: list[str] | None = None,
                   n_jobs: int | None = None) -> list[StrategyResult]:
    """Run every strategy of a `run` config; returns records in config order."""
    base_dir = cfg.get("_base_dir", Path("."))
    objective = build_objective(_require(cfg, "objective", "config"), base_dir)
    steps = build_steps(_require(cfg, "steps", "config"), objective)
    N = int(_require(cfg, "N", "config"))
    T = int(_require(cfg, "T", "config"))
    x0 = build_x0(_require(cfg, "x0", "config"), objective)
    replications = int(cfg.get("replications", 1))
    seed = int(cfg.get("seed", 0))
    stride = cfg.get("trace_stride")

    wanted = None if strategies is None else set(strategies)
    results = []
    for strat in _require(cfg, "strategies", "config"):
        name = _require(strat, "name", "strategy")
        if wanted is not None and name not in wanted:
            continue
        schedule = build_schedule(_require(strat, "schedule", f"strategy {name}"), T, N)
        run_cfg = RunConfig(objective=objective, schedule=schedule, steps=steps,
                            N=N, T=T, x0=x0, replications=replications,
                            seed=seed, trace_stride=stride)
        results.append(StrategyResult(name, schedule,
                                      estimate_expected_error(run_cfg, n_jobs=n_jobs)))
    if not results:
        raise ConfigError("no strategies selected")
    return results


def write_run_outputs(results: list[StrategyResult], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    summary_lines = ["strategy,R_effective,final_mean,final_std,wall_ms"]
    for res in results:
        rec = res.record
        trace = out_dir / f"trace_{res.name}.csv"
        lines = ["t,mean_error,std_error"]
        for t, m, s in zip(rec.trace_ts, rec.trace_mean, rec.trace_std):
            lines.append(f"{t},{_fmt(m)},{_fmt(s)}")
        trace.write_text("\n".join(lines) + "\n")
        written.append(trace)

        comms = out_dir / f"comms_{res.name}.csv"
        comm_lines = ["round,t"]
        for i, tau in enumerate(res.schedule.taus):
            comm_lines.append(f"{i},{tau}")
        comms.write_text("\n".join(comm_lines) + "\n")
        written.append(comms)

        summary_lines.append(
            f"{res.name},{res.schedule.R},{_fmt(rec.final_mean_f)},"
            f"{_fmt(rec.final_std_f)},{rec.wall_ms:.1f}")
    summary = out_dir / "summary.csv"
    summary.write_text("\n".join(summary_lines) + "\n")
    written.append(summary)
    return written


def run_speedup(cfg: dict, families: list[str] | None = None,
                Ns: list[int] | None = None, n_jobs: int | None = None):
    base_dir = cfg.get("_base_dir", Path("."))
    objective = build_objective(_require(cfg, "objective", "config"), base_dir)
    steps = build_steps(_require(cfg, "steps", "config"), objective)
    T = int(_require(cfg, "T", "config"))
    x0 = build_x0(_require(cfg, "x0", "config"), objective)
    schedule = one_shot(T)  # placeholder; speedup_curve swaps per cell
    base = RunConfig(objective=objective, schedule=schedule, steps=steps,
                     N=1, T=T, x0=x0,
                     replications=int(cfg.get("replications", 1)),
                     seed=int(cfg.get("seed", 0)),
                     trace_stride=cfg.get("trace_stride", T))
    Ns = Ns if Ns is not None else [int(n) for n in _require(cfg, "Ns", "config")]
    families = families if families is not None else list(_require(cfg, "families", "config"))
    metric = cfg.get("metric", "f")
    return speedup_curve(base, Ns, families, metric=metric, n_jobs=n_jobs)


def write_speedup_csv(cells, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["family,N,R_effective,speedup,speedup_std"]
    for c in cells:
        if c.saturated:
            lines.append(f"{c.family},{c.N},{c.R_effective},saturated,")
        else:
            lines.append(f"{c.family},{c.N},{c.R_effective},"
                         f"{_fmt(c.speedup)},{_fmt(c.speedup_std)}")
    out_path.write_text("\n".join(lines) + "\n")
    return out_path
