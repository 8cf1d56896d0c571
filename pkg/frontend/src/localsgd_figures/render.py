"""Render figures from the simulator's CSV outputs.

Consumed schemas (fixed headers):
  trace_<strategy>.csv   t,mean_error,std_error
  comms_<strategy>.csv   round,t         (sibling of each trace file)
  speedup CSV            family,N,R_effective,speedup,speedup_std

Plot kinds:
  trace           mean error vs iteration, +-1 std shaded band per strategy
  trace-by-round  mean error vs completed communication rounds
  speedup         speed-up vs N per family, with the y = N reference diagonal
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("trace", "trace-by-round", "speedup")

TRACE_HEADER = ["t", "mean_error", "std_error"]
COMMS_HEADER = ["round", "t"]
SPEEDUP_HEADER = ["family", "N", "R_effective", "speedup", "speedup_std"]


class SchemaError(ValueError):
    """CSV does not match the documented schema; names the offending column."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[Path, ...]
    kind: str
    output: Path
    log_y: bool = True
    log_x: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def read_csv(path: Path, header: list[str]) -> list[dict[str, str]]:
    """Read a CSV and validate its header against the documented schema."""
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            actual = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(header)}")
        for i, col in enumerate(header):
            if i >= len(actual) or actual[i] != col:
                found = actual[i] if i < len(actual) else "<missing>"
                raise SchemaError(
                    f"{path}: column {i + 1} is {found!r}, expected {col!r}")
        if len(actual) > len(header):
            raise SchemaError(
                f"{path}: unexpected extra column {actual[len(header)]!r}")
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _float_column(path: Path, rows: list[dict], col: str) -> list[float]:
    out = []
    for i, row in enumerate(rows, start=2):
        try:
            out.append(float(row[col]))
        except ValueError:
            raise SchemaError(
                f"{path}: row {i}, column {col!r} is not numeric: {row[col]!r}")
    return out


def strategy_name(path: Path) -> str:
    stem = path.stem
    return stem[len("trace_"):] if stem.startswith("trace_") else stem


def comms_sibling(trace_path: Path) -> Path:
    return trace_path.with_name(trace_path.name.replace("trace_", "comms_", 1))


def _band_floor(values: list[float]) -> float:
    positive = [v for v in values if v > 0]
    return min(positive) * 1e-2 if positive else 1e-30


def _plot_trace(ax, spec: FigureSpec):
    for path in spec.inputs:
        rows = read_csv(path, TRACE_HEADER)
        t = _float_column(path, rows, "t")
        mean = _float_column(path, rows, "mean_error")
        std = _float_column(path, rows, "std_error")
        lo = [m - s for m, s in zip(mean, std)]
        hi = [m + s for m, s in zip(mean, std)]
        if spec.log_y:
            floor = _band_floor(mean)
            lo = [max(v, floor) for v in lo]
        line, = ax.plot(t, mean, label=strategy_name(path))
        ax.fill_between(t, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel("iteration")
    ax.set_ylabel("error")


def _plot_trace_by_round(ax, spec: FigureSpec):
    for path in spec.inputs:
        rows = read_csv(path, TRACE_HEADER)
        t = _float_column(path, rows, "t")
        mean = _float_column(path, rows, "mean_error")
        std = _float_column(path, rows, "std_error")
        comms = read_csv(comms_sibling(path), COMMS_HEADER)
        rounds = _float_column(comms_sibling(path), comms, "round")
        taus = _float_column(comms_sibling(path), comms, "t")
        by_t = {v: i for i, v in enumerate(t)}
        xs, ms, ss = [], [], []
        for r, tau in zip(rounds, taus):
            idx = by_t.get(tau)
            if idx is None:  # trace recorded with a stride; use nearest t <= tau
                idx = max((i for i, v in enumerate(t) if v <= tau),
                          default=0, key=lambda i: t[i])
            xs.append(r)
            ms.append(mean[idx])
            ss.append(std[idx])
        lo = [m - s for m, s in zip(ms, ss)]
        hi = [m + s for m, s in zip(ms, ss)]
        if spec.log_y:
            floor = _band_floor(ms)
            lo = [max(v, floor) for v in lo]
        line, = ax.plot(xs, ms, marker="o", markersize=3, label=strategy_name(path))
        ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel("communication round")
    ax.set_ylabel("error")


def _plot_speedup(ax, spec: FigureSpec):
    all_n = []
    for path in spec.inputs:
        rows = read_csv(path, SPEEDUP_HEADER)
        by_family: dict[str, list[tuple[int, float, float]]] = {}
        for i, row in enumerate(rows, start=2):
            if row["speedup"] == "saturated":
                continue
            try:
                n = int(row["N"])
            except ValueError:
                raise SchemaError(
                    f"{path}: row {i}, column 'N' is not an integer: {row['N']!r}")
            s = _float_column(path, [row], "speedup")[0]
            std = float(row["speedup_std"]) if row["speedup_std"] else 0.0
            by_family.setdefault(row["family"], []).append((n, s, std))
        for family, cells in by_family.items():
            cells.sort()
            ns = [c[0] for c in cells]
            ax.errorbar(ns, [c[1] for c in cells], yerr=[c[2] for c in cells],
                        marker="o", markersize=3, capsize=2, label=family)
            all_n.extend(ns)
    if all_n:
        diag = sorted(set(all_n))
        ax.plot(diag, diag, linestyle="--", color="gray", label="y = N")
    ax.set_xlabel("workers N")
    ax.set_ylabel("speed-up")


def render(spec: FigureSpec) -> Path:
    """Render the figure described by spec; returns the output path.

    Inputs are validated before the figure file is touched, so a schema
    error never leaves a partial image behind.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        if spec.kind == "trace":
            _plot_trace(ax, spec)
        elif spec.kind == "trace-by-round":
            _plot_trace_by_round(ax, spec)
        else:
            _plot_speedup(ax, spec)
        if spec.log_y and spec.kind in ("trace", "trace-by-round"):
            ax.set_yscale("log")
        if spec.log_x:
            ax.set_xscale("log")
        ax.legend()
        fig.tight_layout()
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return spec.output
