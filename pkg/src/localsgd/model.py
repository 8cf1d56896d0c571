"""Shared domain types: points, problem constants, run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .schedules import CommSchedule, StepSchedule


def as_point(coords, d: int | None = None) -> np.ndarray:
    """Validate and convert to a float64 parameter vector."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"point must be a 1-d vector of length >= 1, got shape {x.shape}")
    if d is not None and x.size != d:
        raise ValueError(f"dimension mismatch: expected {d}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


@dataclass(frozen=True)
class ProblemConstants:
    """Declared constants of an objective.

    mu: strong-convexity / PL modulus, L: smoothness, c / sigma2: the
    strong-growth noise parameters, f_star / x_star: the optimum.
    """

    mu: float
    L: float
    c: float
    sigma2: float
    f_star: float
    x_star: np.ndarray

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if self.L < self.mu:
            raise ValueError(f"L must be >= mu, got L={self.L} < mu={self.mu}")
        if self.c < 0 or self.sigma2 < 0:
            raise ValueError("noise constants c and sigma2 must be >= 0")

    @property
    def kappa(self) -> float:
        return self.L / self.mu


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one experiment cell."""

    objective: object
    schedule: "CommSchedule"
    steps: "StepSchedule"
    N: int
    T: int
    x0: np.ndarray
    replications: int = 1
    seed: int = 0
    trace_stride: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.schedule.T != self.T:
            raise ValueError(
                f"schedule horizon {self.schedule.T} != run horizon {self.T}")
