"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 runtime divergence.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import harness
from .bounds import (BoundInputs, bound_fixed_interval, bound_general,
                     bound_osa_leading, bound_theorem1)
from .model import ProblemConstants
from .objectives import LibsvmParseError, parse_libsvm
from .schedules import fixed_schedule, growing_schedule, one_shot
from .simulator import DivergenceError

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _fail_config(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


@click.group()
def main():
    """Local SGD simulator: experiments, speed-up curves and bounds."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--replications", type=int, default=None)
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--strategies", default=None, help="Comma-separated subset of strategy names.")
@click.option("--jobs", type=int, default=None, help="Replication parallelism (default $LOCALSGD_WORKERS).")
def run(config_path, seed, replications, output_dir, strategies, jobs):
    """Run the trace experiment described by a JSON config."""
    try:
        cfg = harness.load_config(config_path)
        if seed is not None:
            cfg["seed"] = seed
        if replications is not None:
            cfg["replications"] = replications
        wanted = strategies.split(",") if strategies else None
        results = harness.run_experiment(cfg, strategies=wanted, n_jobs=jobs)
    except harness.ConfigError as exc:
        _fail_config(str(exc))
    except DivergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DIVERGED)
    out_dir = output_dir or cfg.get("output_dir", "results")
    if not Path(out_dir).is_absolute():
        out_dir = Path(config_path).parent / out_dir
    for path in harness.write_run_outputs(results, out_dir):
        click.echo(f"wrote {path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--replications", type=int, default=None)
@click.option("--output", type=click.Path(), default=None)
@click.option("--families", default=None, help="Comma-separated subset of families.")
@click.option("--workers", "ns", default=None, help="Comma-separated N values.")
@click.option("--jobs", type=int, default=None)
def speedup(config_path, seed, replications, output, families, ns, jobs):
    """Compute speed-up curves over worker counts and schedule families."""
    try:
        cfg = harness.load_config(config_path)
        if seed is not None:
            cfg["seed"] = seed
        if replications is not None:
            cfg["replications"] = replications
        fam = families.split(",") if families else None
        n_list = [int(v) for v in ns.split(",")] if ns else None
        cells = harness.run_speedup(cfg, families=fam, Ns=n_list, n_jobs=jobs)
    except harness.ConfigError as exc:
        _fail_config(str(exc))
    except DivergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DIVERGED)
    out = output or cfg.get("output", "results/speedup.csv")
    if not Path(out).is_absolute():
        out = Path(config_path).parent / out
    path = harness.write_speedup_csv(cells, out)
    click.echo(f"wrote {path}")


def _constants(mu, L, sigma2, c):
    try:
        import numpy as np
        return ProblemConstants(mu=mu, L=L, c=c, sigma2=sigma2,
                                f_star=0.0, x_star=np.zeros(1))
    except ValueError as exc:
        _fail_config(str(exc))


@main.group()
def bound():
    """Evaluate closed-form error bounds."""


_common = [
    click.option("--mu", type=float, required=True),
    click.option("--L", "L", type=float, required=True),
    click.option("--sigma2", type=float, required=True),
    click.option("--N", "N", type=int, required=True),
    click.option("--T", "T", type=int, required=True),
    click.option("--c", type=float, default=0.0),
    click.option("--beta", type=float, default=1.0),
    click.option("--xi0", type=float, default=0.0),
]


def _with_common(f):
    for opt in reversed(_common):
        f = opt(f)
    return f


@bound.command("theorem1")
@_with_common
@click.option("--R", "R", type=int, required=True)
def bound_theorem1_cmd(mu, L, sigma2, N, T, c, beta, xi0, R):
    try:
        b = BoundInputs(_constants(mu, L, sigma2, c), N=N, T=T, R=R, beta=beta, xi0=xi0)
        click.echo(f"theorem1 = {bound_theorem1(b):.10g}")
    except ValueError as exc:
        _fail_config(str(exc))


@bound.command("general")
@_with_common
@click.option("--schedule", "schedule_kind",
              type=click.Choice(["growing", "fixed", "one-shot"]), required=True)
@click.option("--R", "R", type=int, default=None, help="Rounds (growing schedule).")
@click.option("--H", "H", type=int, default=None, help="Interval (fixed schedule).")
def bound_general_cmd(mu, L, sigma2, N, T, c, beta, xi0, schedule_kind, R, H):
    try:
        if schedule_kind == "growing":
            if R is None:
                _fail_config("--R is required for the growing schedule")
            schedule = growing_schedule(T, R)
        elif schedule_kind == "fixed":
            if H is None:
                _fail_config("--H is required for the fixed schedule")
            schedule = fixed_schedule(T, H)
        else:
            schedule = one_shot(T)
        b = BoundInputs(_constants(mu, L, sigma2, c), N=N, T=T, R=schedule.R,
                        beta=beta, xi0=xi0, schedule=schedule)
        result = bound_general(b)
        flag = "OK" if result.condition_holds else "VIOLATED"
        click.echo(f"general = {result.value:.10g} (condition: {flag})")
    except ValueError as exc:
        _fail_config(str(exc))


@bound.command("fixed-interval")
@_with_common
@click.option("--H", "H", type=int, required=True)
def bound_fixed_cmd(mu, L, sigma2, N, T, c, beta, xi0, H):
    try:
        b = BoundInputs(_constants(mu, L, sigma2, c), N=N, T=T, R=1, beta=beta, xi0=xi0)
        click.echo(f"fixed-interval = {bound_fixed_interval(b, H):.10g}")
    except ValueError as exc:
        _fail_config(str(exc))


@bound.command("osa")
@click.option("--mu", type=float, required=True)
@click.option("--L", "L", type=float, default=None, help="Defaults to mu.")
@click.option("--sigma2", type=float, required=True)
@click.option("--N", "N", type=int, required=True)
@click.option("--T", "T", type=int, required=True)
def bound_osa_cmd(mu, L, sigma2, N, T):
    try:
        b = BoundInputs(_constants(mu, L if L is not None else mu, sigma2, 0.0),
                        N=N, T=T, R=1, beta=1.0, xi0=0.0)
        click.echo(f"osa = {bound_osa_leading(b):.10g}")
    except ValueError as exc:
        _fail_config(str(exc))


@main.command("parse-data")
@click.argument("path", type=click.Path())
@click.option("--dim", type=int, default=None, help="Force the feature count.")
def parse_data(path, dim):
    """Validate a LIBSVM file and print its size."""
    p = Path(path)
    if not p.exists():
        _fail_config(f"dataset file not found: {p}")
    try:
        ds = parse_libsvm(p.read_text().splitlines(), d=dim)
    except (LibsvmParseError, ValueError) as exc:
        _fail_config(str(exc))
    click.echo(f"M = {ds.M}")
    click.echo(f"d = {ds.d}")


if __name__ == "__main__":
    main()
