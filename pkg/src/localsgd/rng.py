"""Counter-based random streams.

Every draw is a pure function of the tuple (seed, replication, worker,
iteration, draw index).  There is no mutable generator state, so results
cannot depend on evaluation order or on how many replications run in
parallel.  The mixing function is the splitmix64 finalizer; Gaussians come
from a Box-Muller transform of two hashed uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF
_INV53 = 2.0**-53


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _u64(value) -> np.ndarray:
    # wraps plain ints (possibly negative) into 64 bits
    if isinstance(value, int):
        return np.asarray([value & _MASK64], dtype=np.uint64)
    arr = np.asarray(value)
    return arr if arr.dtype == np.uint64 else arr.astype(np.uint64)


def _mix_in(h: np.ndarray, v) -> np.ndarray:
    return _finalize((h + _GOLDEN) ^ _u64(v))


def _stream_key(seed, replication, worker, iteration) -> np.ndarray:
    """Hash the stream coordinates down to one 64-bit key (broadcasting)."""
    h = _finalize(_u64(seed) + _GOLDEN)
    h = _mix_in(h, replication)
    h = _mix_in(h, worker)
    h = _mix_in(h, iteration)
    return h


def _words(key: np.ndarray, indices) -> np.ndarray:
    """The `indices`-th 64-bit outputs of the keyed counter stream."""
    return _finalize(key + (_u64(indices) + np.uint64(1)) * _GOLDEN)


def _unit(words: np.ndarray) -> np.ndarray:
    # uniform on (0, 1]; never 0, so log() below is safe
    return ((words >> np.uint64(11)).astype(np.float64) + 1.0) * _INV53


def _gauss_from_key(key: np.ndarray, indices: np.ndarray) -> np.ndarray:
    u1 = _unit(_words(key, 2 * indices))
    u2 = _unit(_words(key, 2 * indices + 1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True)
class RngStream:
    """Immutable coordinates of one random stream.

    Streams are values: `at()` returns a re-pointed copy, nothing is ever
    mutated in place.
    """

    seed: int
    replication: int = 0
    worker: int = 0
    iteration: int = 0

    def at(self, *, replication: int | None = None, worker: int | None = None,
           iteration: int | None = None) -> "RngStream":
        changes = {}
        if replication is not None:
            changes["replication"] = replication
        if worker is not None:
            changes["worker"] = worker
        if iteration is not None:
            changes["iteration"] = iteration
        return replace(self, **changes)

    def _key(self) -> np.ndarray:
        return _stream_key(
            np.asarray([self.seed & _MASK64], dtype=np.uint64),
            self.replication, self.worker, self.iteration)

    def gauss(self, mean: float, variance: float, n: int | None = None,
              offset: int = 0):
        """Draw N(mean, variance) at draw indices offset..offset+n-1.

        With n=None returns a scalar (draw index `offset`).
        """
        if variance < 0:
            raise ValueError(f"variance must be >= 0, got {variance}")
        count = 1 if n is None else n
        idx = np.arange(offset, offset + count, dtype=np.uint64)
        z = _gauss_from_key(self._key(), idx)
        out = mean + np.sqrt(variance) * z
        return float(out[0]) if n is None else out

    def integers(self, upper: int, n: int | None = None, offset: int = 0):
        """Uniform integers in [0, upper) at the given draw indices."""
        if upper < 1:
            raise ValueError(f"upper must be >= 1, got {upper}")
        count = 1 if n is None else n
        idx = np.arange(offset, offset + count, dtype=np.uint64)
        w = _words(self._key(), idx) % np.uint64(upper)
        return int(w[0]) if n is None else w.astype(np.int64)


def gaussian_draw(stream: RngStream, mean: float, variance: float) -> float:
    """Single Gaussian sample, fully determined by the stream coordinates."""
    return stream.gauss(mean, variance)


def worker_gauss(seed: int, replication: int, iteration: int,
                 n_workers: int, n_draws: int, offset: int = 0) -> np.ndarray:
    """N(0,1) draws for all workers of one iteration, shape (n_workers, n_draws).

    Row i is bit-identical to RngStream(seed, replication, i, iteration)
    .gauss(0, 1, n_draws, offset).
    """
    workers = np.arange(n_workers, dtype=np.uint64)[:, None]
    key = _stream_key(np.asarray([seed & _MASK64], dtype=np.uint64),
                      replication, workers, iteration)
    idx = np.arange(offset, offset + n_draws, dtype=np.uint64)[None, :]
    return _gauss_from_key(key, idx)


def worker_iter_gauss(seed: int, replication: int, n_workers: int,
                      n_iterations: int, n_draws: int,
                      offset: int = 0) -> np.ndarray:
    """N(0,1) draws for a whole replication, shape (n_workers, n_iterations,
    n_draws).

    Slice [:, t, :] equals worker_gauss(..., iteration=t, ...): the key chain
    and transform are the same, only evaluated in one batch.
    """
    workers = np.arange(n_workers, dtype=np.uint64)[:, None, None]
    iterations = np.arange(n_iterations, dtype=np.uint64)[None, :, None]
    h = _finalize(_u64(seed) + _GOLDEN)
    h = _mix_in(h, replication)
    h = _mix_in(h, workers)
    key = _mix_in(h, iterations)
    idx = np.arange(offset, offset + n_draws, dtype=np.uint64)[None, None, :]
    return _gauss_from_key(key, idx)


def worker_iter_integers(seed: int, replication: int, n_workers: int,
                         n_iterations: int, upper: int, n_draws: int,
                         offset: int = 0) -> np.ndarray:
    """Uniform ints in [0, upper), shape (n_workers, n_iterations, n_draws)."""
    workers = np.arange(n_workers, dtype=np.uint64)[:, None, None]
    iterations = np.arange(n_iterations, dtype=np.uint64)[None, :, None]
    h = _finalize(_u64(seed) + _GOLDEN)
    h = _mix_in(h, replication)
    h = _mix_in(h, workers)
    key = _mix_in(h, iterations)
    idx = np.arange(offset, offset + n_draws, dtype=np.uint64)[None, None, :]
    return (_words(key, idx) % np.uint64(upper)).astype(np.int64)


def worker_integers(seed: int, replication: int, iteration: int,
                    n_workers: int, upper: int, n_draws: int,
                    offset: int = 0) -> np.ndarray:
    """Uniform ints in [0, upper) for all workers, shape (n_workers, n_draws)."""
    workers = np.arange(n_workers, dtype=np.uint64)[:, None]
    key = _stream_key(np.asarray([seed & _MASK64], dtype=np.uint64),
                      replication, workers, iteration)
    idx = np.arange(offset, offset + n_draws, dtype=np.uint64)[None, :]
    return (_words(key, idx) % np.uint64(upper)).astype(np.int64)
