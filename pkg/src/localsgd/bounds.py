"""Closed-form convergence bounds for Local SGD and one-shot averaging.

All evaluators are pure arithmetic over the problem constants; the general
bound sums (t - tau(t))/(t + beta) exactly over a concrete schedule so
arbitrary communication-time sets can be scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ProblemConstants
from .schedules import CommSchedule, check_beta_condition


@dataclass(frozen=True)
class BoundInputs:
    constants: ProblemConstants
    N: int
    T: int
    R: int
    beta: float
    xi0: float
    schedule: CommSchedule | None = None

    def __post_init__(self):
        if self.xi0 < 0:
            raise ValueError(f"initial gap xi0 must be >= 0, got {self.xi0}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.N < 1 or self.T < 1 or self.R < 1:
            raise ValueError(f"N, T, R must be >= 1, got N={self.N}, T={self.T}, R={self.R}")


def _first_two_terms(b: BoundInputs) -> float:
    k = b.constants
    return (b.beta**2 * b.xi0 / b.T**2
            + 9.0 * k.L * k.sigma2 / (2.0 * k.mu**2 * b.N * b.T))


def bound_theorem1(b: BoundInputs) -> float:
    """Growing-interval guarantee:

    beta^2 xi0 / T^2 + 9 L s^2 / (2 mu^2 N T) + 144 L^2 s^2 / (mu^3 R T).
    """
    if b.R > math.isqrt(2 * b.T):
        raise ValueError(f"R={b.R} exceeds floor(sqrt(2T))={math.isqrt(2 * b.T)}")
    k = b.constants
    return _first_two_terms(b) + 144.0 * k.L**2 * k.sigma2 / (k.mu**3 * b.R * b.T)


def interval_sum(schedule: CommSchedule, beta: float) -> float:
    """sum_{t=0}^{T-1} (t - tau(t)) / (t + beta), exactly over the schedule."""
    total = 0.0
    for tau_i, tau_next in zip(schedule.taus, schedule.taus[1:]):
        for t in range(tau_i, tau_next):
            total += (t - tau_i) / (t + beta)
    return total


@dataclass(frozen=True)
class GeneralBound:
    value: float
    condition_holds: bool


def bound_general(b: BoundInputs) -> GeneralBound:
    """Schedule-exact guarantee:

    first two terms + (18 L^2 s^2 / (mu^3 T^2)) sum_t (t - tau(t))/(t + beta).

    The value is returned even when the interval condition on beta fails;
    the flag records whether the guarantee actually applies.
    """
    if b.schedule is None:
        raise ValueError("bound_general requires a schedule")
    if b.schedule.T != b.T:
        raise ValueError(f"schedule horizon {b.schedule.T} != T={b.T}")
    k = b.constants
    holds = check_beta_condition(b.schedule, b.beta, k.kappa, k.c, b.N)
    value = (_first_two_terms(b)
             + 18.0 * k.L**2 * k.sigma2 / (k.mu**3 * b.T**2)
             * interval_sum(b.schedule, b.beta))
    return GeneralBound(value, holds)


def bound_fixed_interval(b: BoundInputs, H: int) -> float:
    """Fixed-interval corollary:

    first two terms + 18 L^2 s^2 (H-1) ln(1 + T/(beta-1)) / (mu^3 T^2).
    """
    if H < 1:
        raise ValueError(f"H must be >= 1, got {H}")
    if b.beta <= 1:
        raise ValueError(f"fixed-interval bound requires beta > 1, got {b.beta}")
    k = b.constants
    return (_first_two_terms(b)
            + 18.0 * k.L**2 * k.sigma2 * (H - 1)
            * math.log1p(b.T / (b.beta - 1.0)) / (k.mu**3 * b.T**2))


def bound_osa_leading(b: BoundInputs) -> float:
    """Leading term of the one-shot-averaging guarantee: 4 s^2 / (3 mu^2 N T).

    Valid for T >= t0 = floor(2L/mu); the o(1/T) remainder is not modeled.
    """
    k = b.constants
    t0 = int(2 * k.L / k.mu)
    if b.T < t0:
        raise ValueError(f"T={b.T} below t0 = floor(2L/mu) = {t0}")
    return 4.0 * k.sigma2 / (3.0 * k.mu**2 * b.N * b.T)
