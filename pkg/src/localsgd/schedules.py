"""Communication-time sets and step-size sequences.

The headline construction is the growing-interval schedule: with
a = ceil(2T/R^2) the i-th inter-communication interval has length a(i+1),
so communication is dense early and sparse late.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CommSchedule:
    """Ordered communication times 0 = tau_0 < tau_1 < ... < tau_R = T."""

    taus: tuple[int, ...]

    def __post_init__(self):
        taus = self.taus
        if len(taus) < 2 or taus[0] != 0:
            raise ValueError(f"schedule must start at 0 and contain at least one round: {taus}")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError(f"communication times must be strictly increasing: {taus}")

    @property
    def T(self) -> int:
        return self.taus[-1]

    @property
    def R(self) -> int:
        """Number of communication rounds (averaging events)."""
        return len(self.taus) - 1

    def intervals(self) -> list[int]:
        """H_i = tau_{i+1} - tau_i for i = 0..R-1."""
        return [b - a for a, b in zip(self.taus, self.taus[1:])]

    def tau_of(self, t: int) -> int:
        """Most recent communication time <= t."""
        if t < 0 or t > self.T:
            raise ValueError(f"t={t} outside [0, {self.T}]")
        return self.taus[bisect.bisect_right(self.taus, t) - 1]

    def comm_set(self) -> frozenset[int]:
        return frozenset(self.taus[1:])


def growing_schedule(T: int, R: int, a: int | None = None) -> CommSchedule:
    """Linearly growing intervals: H_i = a(i+1), tau_{i+1} = min(tau_i + H_i, T).

    By default a = ceil(2T/R^2).  Capping at T can collapse trailing rounds;
    duplicates are dropped, so the effective round count may be below R.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 1 <= R <= math.isqrt(2 * T):
        raise ValueError(f"R must satisfy 1 <= R <= floor(sqrt(2T)) = {math.isqrt(2 * T)}, got {R}")
    if a is None:
        a = -(-2 * T // (R * R))
    elif a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    taus = [0]
    for i in range(R):
        nxt = min(taus[-1] + a * (i + 1), T)
        if nxt > taus[-1]:
            taus.append(nxt)
    if taus[-1] != T:
        taus.append(T)
    return CommSchedule(tuple(taus))


def fixed_schedule(T: int, H: int) -> CommSchedule:
    """Equally spaced rounds every H steps; the last interval may be shorter."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 1 <= H <= T:
        raise ValueError(f"H must satisfy 1 <= H <= T={T}, got {H}")
    taus = list(range(0, T, H)) + [T]
    return CommSchedule(tuple(taus))


def one_shot(T: int) -> CommSchedule:
    """A single averaging at t = T."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    return CommSchedule((0, T))


def beta_min(kappa: float, c: float, N: int, T: int, R: int) -> float:
    """Smallest step-size offset the growing-interval guarantee allows:

    max{ 9k, 12 k^2 c max{ln 3, ln(1 + T/(4 k R^2))} + 3k(1 + c/N) }.
    """
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if c < 0:
        raise ValueError(f"c must be >= 0, got {c}")
    if N < 1 or R < 1 or T < 1:
        raise ValueError(f"N, T, R must be >= 1, got N={N}, T={T}, R={R}")
    log_term = max(math.log(3.0), math.log1p(T / (4.0 * kappa * R * R)))
    return max(9.0 * kappa, 12.0 * kappa**2 * c * log_term + 3.0 * kappa * (1.0 + c / N))


def check_beta_condition(schedule: CommSchedule, beta: float, kappa: float,
                         c: float, N: int) -> bool:
    """Whether, for every interval i,

    12 k^2 c ln(1 + (H_i - 1)/(tau_i + beta)) + 3k(1 + c/N) - (tau_i + beta) <= 0.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    for tau_i, H_i in zip(schedule.taus, schedule.intervals()):
        lhs = (12.0 * kappa**2 * c * math.log1p((H_i - 1) / (tau_i + beta))
               + 3.0 * kappa * (1.0 + c / N) - (tau_i + beta))
        if lhs > 0:
            return False
    return True


@dataclass(frozen=True)
class StepSchedule:
    """Map t -> eta_t.

    Kinds:
      inverse-t        eta_t = 3/(mu (t + beta))
      theta            eta_t = 1/L for t < t0 = floor(2L/mu), else 2t/(mu (t+1)^2)
      constant         eta_t = eta
      capped-inverse-t eta_t = min{1/L, 2/(mu (t+1))}
    """

    kind: str
    mu: float = 1.0
    L: float = 1.0
    beta: float = 1.0
    eta: float = 0.0

    _KINDS = ("inverse-t", "theta", "constant", "capped-inverse-t")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown step schedule kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind == "constant" and self.eta <= 0:
            raise ValueError(f"constant step size must be > 0, got {self.eta}")
        if self.kind == "inverse-t" and self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    def step_size(self, t: int) -> float:
        if t < 0:
            raise ValueError(f"t must be >= 0, got {t}")
        if self.kind == "inverse-t":
            return 3.0 / (self.mu * (t + self.beta))
        if self.kind == "theta":
            t0 = int(2 * self.L / self.mu)
            if t < t0:
                return 1.0 / self.L
            return 2.0 * t / (self.mu * (t + 1.0) ** 2)
        if self.kind == "capped-inverse-t":
            return min(1.0 / self.L, 2.0 / (self.mu * (t + 1.0)))
        return self.eta


def step_size(schedule: StepSchedule, t: int) -> float:
    return schedule.step_size(t)


def inverse_t_steps(mu: float, beta: float) -> StepSchedule:
    return StepSchedule("inverse-t", mu=mu, beta=beta)


def theta_steps(mu: float, L: float) -> StepSchedule:
    return StepSchedule("theta", mu=mu, L=L)


def constant_steps(eta: float) -> StepSchedule:
    return StepSchedule("constant", eta=eta)


def capped_inverse_t_steps(mu: float, L: float) -> StepSchedule:
    return StepSchedule("capped-inverse-t", mu=mu, L=L)
