"""Experiment objectives: exact gradients plus calibrated stochastic oracles.

Three objectives are provided:

* QuadraticStrongGrowth - F(x) = sum_i (i/2) x_i^2 with multiplicative and
  additive Gaussian gradient noise, so the noise second moment is exactly
  c1 ||grad F(x)||^2 + d c2.
* PiecewiseQuadratic1D - x^2/2 on the left of 0, x^2 on the right; smooth
  but not twice differentiable at the minimizer.
* LogisticL2 - l2-regularized logistic regression over a LIBSVM-format
  dataset, with single-sample (or mini-batch) stochastic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ProblemConstants, as_point
from .rng import (RngStream, worker_gauss, worker_integers,
                  worker_iter_gauss, worker_iter_integers)


class LibsvmParseError(ValueError):
    """Malformed LIBSVM input; carries the 1-based offending line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class Dataset:
    """Dense feature matrix (rows are data points) with {0,1} labels."""

    features: np.ndarray
    labels: np.ndarray

    @property
    def M(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def parse_libsvm(lines, d: int | None = None) -> Dataset:
    """Parse LIBSVM text: `<label> <idx>:<val> ...`, 1-based increasing indices.

    Labels -1/+1 map to 0/1; 0/1 pass through.  `d` overrides the feature
    count (must be >= the max index seen); otherwise d = max index.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    rows = []
    labels = []
    max_idx = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(lineno, f"bad label token {tokens[0]!r}")
        if label in (-1.0, 0.0):
            label = 0
        elif label == 1.0:
            label = 1
        else:
            raise LibsvmParseError(lineno, f"label must be in {{-1, 0, +1}}, got {tokens[0]}")
        prev = 0
        feats = []
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise LibsvmParseError(lineno, f"bad feature token {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise LibsvmParseError(lineno, f"bad feature token {tok!r}")
            if idx < 1:
                raise LibsvmParseError(lineno, f"feature index must be >= 1, got {idx}")
            if idx <= prev:
                raise LibsvmParseError(lineno, f"non-increasing feature index {idx} after {prev}")
            prev = idx
            feats.append((idx - 1, val))
        max_idx = max(max_idx, prev)
        rows.append(feats)
        labels.append(label)
    if d is None:
        d = max_idx
    elif d < max_idx:
        raise ValueError(f"dimension override d={d} below max index {max_idx}")
    features = np.zeros((len(rows), d), dtype=np.float64)
    for i, feats in enumerate(rows):
        for j, v in feats:
            features[i, j] = v
    return Dataset(features, np.asarray(labels, dtype=np.int64))


class QuadraticStrongGrowth:
    """F(x) = sum_{i=1}^d (i/2) x_i^2; minimum 0 at the origin, mu=1, L=d.

    Stochastic gradient component i is i x_i (1 + z1_i) + z2_i with
    z1_i ~ N(0, c1), z2_i ~ N(0, c2), so c = c1 and sigma^2 = d c2.
    """

    def __init__(self, d: int, c1: float = 0.0, c2: float = 0.0):
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        if c1 < 0 or c2 < 0:
            raise ValueError("noise variances must be >= 0")
        self.d = d
        self.c1 = c1
        self.c2 = c2
        self._scale = np.arange(1, d + 1, dtype=np.float64)
        self.constants = ProblemConstants(
            mu=1.0, L=float(d), c=c1, sigma2=d * c2,
            f_star=0.0, x_star=np.zeros(d))

    def value(self, x) -> float:
        x = as_point(x, self.d)
        return float(0.5 * np.dot(self._scale, x * x))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.d)
        return self._scale * x

    def stochastic_gradients(self, X: np.ndarray, seed: int, replication: int,
                             iteration: int) -> np.ndarray:
        z = worker_gauss(seed, replication, iteration, X.shape[0], 2 * self.d)
        z1 = np.sqrt(self.c1) * z[:, :self.d]
        z2 = np.sqrt(self.c2) * z[:, self.d:]
        return self._scale * X * (1.0 + z1) + z2

    def stochastic_gradient(self, x, stream: RngStream) -> np.ndarray:
        x = as_point(x, self.d)
        z = stream.gauss(0.0, 1.0, 2 * self.d)
        z1 = np.sqrt(self.c1) * z[:self.d]
        z2 = np.sqrt(self.c2) * z[self.d:]
        return self._scale * x * (1.0 + z1) + z2

    def make_replication_sampler(self, seed: int, replication: int,
                                 n_workers: int, T: int):
        """Pre-draw all noise for one replication; returns (X, t) -> gradients."""
        z = worker_iter_gauss(seed, replication, n_workers, T, 2 * self.d)
        z1 = np.sqrt(self.c1) * z[:, :, :self.d]
        z2 = np.sqrt(self.c2) * z[:, :, self.d:]
        scale = self._scale

        def sample(X: np.ndarray, t: int) -> np.ndarray:
            return scale * X * (1.0 + z1[:, t]) + z2[:, t]

        return sample


class PiecewiseQuadratic1D:
    """F(x) = x^2/2 for x <= 0, x^2 for x > 0; mu=1, L=2, minimum 0 at 0.

    Continuously differentiable but not twice differentiable at the
    minimizer.  Stochastic gradients add N(0, sigma^2) noise.
    """

    d = 1

    def __init__(self, sigma: float):
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        self.sigma = sigma
        self.constants = ProblemConstants(
            mu=1.0, L=2.0, c=0.0, sigma2=sigma * sigma,
            f_star=0.0, x_star=np.zeros(1))

    def value(self, x) -> float:
        x = as_point(x, 1)
        v = x[0]
        return float(0.5 * v * v if v <= 0 else v * v)

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, 1)
        v = x[0]
        return np.asarray([v if v <= 0 else 2.0 * v])

    def _grad_batch(self, X: np.ndarray) -> np.ndarray:
        return np.where(X <= 0, X, 2.0 * X)

    def stochastic_gradients(self, X: np.ndarray, seed: int, replication: int,
                             iteration: int) -> np.ndarray:
        z = worker_gauss(seed, replication, iteration, X.shape[0], 1)
        return self._grad_batch(X) + self.sigma * z

    def stochastic_gradient(self, x, stream: RngStream) -> np.ndarray:
        x = as_point(x, 1)
        return self.gradient(x) + self.sigma * stream.gauss(0.0, 1.0, 1)

    def make_replication_sampler(self, seed: int, replication: int,
                                 n_workers: int, T: int):
        noise = self.sigma * worker_iter_gauss(seed, replication, n_workers, T, 1)

        def sample(X: np.ndarray, t: int) -> np.ndarray:
            return np.where(X <= 0, X, 2.0 * X) + noise[:, t]

        return sample


class LogisticL2:
    """l2-regularized logistic loss over a dataset.

    F(x) = (1/M) sum_j [ln(1 + exp(x.A_j)) - 1{b_j=1} x.A_j] + (lambda/2)||x||^2

    mu = lambda; L = lambda + lambda_max(A'A / (4M)) via power iteration.
    The reference optimum (x*, f*) is computed lazily by full-gradient
    descent with step 1/L down to gradient norm 1e-10 and cached.
    """

    def __init__(self, dataset: Dataset, lam: float, batch: int = 1):
        if lam < 0:
            raise ValueError(f"lambda must be >= 0, got {lam}")
        if batch < 1:
            raise ValueError(f"batch size must be >= 1, got {batch}")
        if dataset.M < 1:
            raise ValueError("dataset is empty")
        self.dataset = dataset
        self.lam = lam
        self.batch = batch
        self.d = dataset.d
        self._A = dataset.features
        self._b = dataset.labels.astype(np.float64)
        self.L = lam + self._data_smoothness()
        self._constants: ProblemConstants | None = None

    def _data_smoothness(self, tol: float = 1e-6, max_iter: int = 10_000) -> float:
        """lambda_max(A'A/(4M)) by power iteration to relative tolerance."""
        A = self._A
        v = np.ones(self.d) / np.sqrt(self.d)
        lam_prev = 0.0
        for _ in range(max_iter):
            w = A.T @ (A @ v) / (4.0 * self.dataset.M)
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return 0.0
            v = w / norm
            if abs(norm - lam_prev) <= tol * norm:
                return norm
            lam_prev = norm
        return lam_prev

    @property
    def constants(self) -> ProblemConstants:
        if self._constants is None:
            x_star, f_star = self.reference_optimum()
            self._constants = ProblemConstants(
                mu=self.lam, L=self.L, c=0.0, sigma2=0.0,
                f_star=f_star, x_star=x_star)
        return self._constants

    def reference_optimum(self, grad_tol: float = 1e-10,
                          max_iter: int = 2_000_000) -> tuple[np.ndarray, float]:
        if self.lam <= 0:
            raise ValueError("reference optimum requires lambda > 0")
        x = np.zeros(self.d)
        step = 1.0 / self.L
        for _ in range(max_iter):
            g = self.gradient(x)
            if np.linalg.norm(g) <= grad_tol:
                break
            x = x - step * g
        else:
            raise RuntimeError("reference optimum did not converge")
        return x, self.value(x)

    def value(self, x) -> float:
        x = as_point(x, self.d)
        z = self._A @ x
        data = np.mean(np.logaddexp(0.0, z) - self._b * z)
        return float(data + 0.5 * self.lam * np.dot(x, x))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.d)
        z = self._A @ x
        p = np.exp(-np.logaddexp(0.0, -z))
        return self._A.T @ (p - self._b) / self.dataset.M + self.lam * x

    def stochastic_gradients(self, X: np.ndarray, seed: int, replication: int,
                             iteration: int) -> np.ndarray:
        idx = worker_integers(seed, replication, iteration,
                              X.shape[0], self.dataset.M, self.batch)
        A_batch = self._A[idx]                       # (N, b, d)
        b_batch = self._b[idx]                       # (N, b)
        z = np.einsum("nbd,nd->nb", A_batch, X)
        p = np.exp(-np.logaddexp(0.0, -z))
        g_data = np.einsum("nb,nbd->nd", p - b_batch, A_batch) / self.batch
        return g_data + self.lam * X

    def stochastic_gradient(self, x, stream: RngStream) -> np.ndarray:
        x = as_point(x, self.d)
        idx = stream.integers(self.dataset.M, self.batch)
        A_batch = self._A[idx]
        z = A_batch @ x
        p = np.exp(-np.logaddexp(0.0, -z))
        return (p - self._b[idx]) @ A_batch / self.batch + self.lam * x

    def make_replication_sampler(self, seed: int, replication: int,
                                 n_workers: int, T: int):
        idx = worker_iter_integers(seed, replication, n_workers, T,
                                   self.dataset.M, self.batch)
        A, b, lam, batch = self._A, self._b, self.lam, self.batch

        def sample(X: np.ndarray, t: int) -> np.ndarray:
            A_batch = A[idx[:, t]]               # (N, b, d)
            z = np.einsum("nbd,nd->nb", A_batch, X)
            p = np.exp(-np.logaddexp(0.0, -z))
            g_data = np.einsum("nb,nbd->nd", p - b[idx[:, t]], A_batch) / batch
            return g_data + lam * X

        return sample
