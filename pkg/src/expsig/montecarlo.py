"""Monte Carlo check of phi^M(T) from sampled piecewise-linear Brownian paths.

Each sample draws ``M`` Gaussian increments with covariance ``(T/M) I`` and
forms the Chen product of the segment exponentials.  Sample ``i`` is driven by
``numpy.random.default_rng([master_seed, i])`` alone, so results do not depend
on batching or the number of worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import tensor as ta
from .expected import _positive_time, pwl_expected_signature
from .tensor import TensorSeries

__all__ = [
    "McEstimate",
    "sample_increments",
    "segment_signature",
    "signature_of_increments",
    "sample_pwl_signature",
    "batch_signatures",
    "estimate_expected_signature",
]

CHUNK = 2048


def sample_increments(d: int, T, M: int, sample_index: int, master_seed: int) -> np.ndarray:
    """``(M, d)`` array of independent N(0, T/M) increments for one sample."""
    rng = np.random.default_rng([int(master_seed), int(sample_index)])
    scale = np.sqrt(float(_positive_time(T)) / M)
    return rng.standard_normal((M, d)) * scale


def segment_signature(increment, level: int) -> TensorSeries:
    """Signature of a straight segment: the truncated exponential of its increment."""
    v = np.asarray(increment, dtype=np.float64)
    d = v.size
    blocks = [np.ones(1)]
    for k in range(1, level + 1):
        blocks.append(np.multiply.outer(blocks[-1], v).reshape(-1) * (1.0 / k))
    return TensorSeries._trusted(d, level, blocks, "float")


def signature_of_increments(increments, level: int) -> TensorSeries:
    """Chen product of the segment signatures, in path order."""
    inc = np.atleast_2d(np.asarray(increments, dtype=np.float64))
    d = inc.shape[1]
    sig = ta.unit(d, level, "float")
    for v in inc:
        sig = ta.product(sig, segment_signature(v, level))
    return sig


def sample_pwl_signature(d: int, T, M: int, level: int, sample_index: int, master_seed: int) -> TensorSeries:
    if M < 1 or level < 1:
        raise ValueError("need M >= 1 and level >= 1")
    return signature_of_increments(sample_increments(d, T, M, sample_index, master_seed), level)


def _batch_exp(v: np.ndarray, level: int) -> list[np.ndarray]:
    # v: (B, d) -> per-level (B, d^k)
    B = v.shape[0]
    blocks = [np.ones((B, 1))]
    for k in range(1, level + 1):
        blocks.append((blocks[-1][:, :, None] * v[:, None, :]).reshape(B, -1) / k)
    return blocks


def _batch_product(a: list[np.ndarray], b: list[np.ndarray]) -> list[np.ndarray]:
    B = a[0].shape[0]
    out = []
    for n in range(len(a)):
        acc = a[n] * b[0]
        for k in range(n):
            acc = acc + (a[k][:, :, None] * b[n - k][:, None, :]).reshape(B, -1)
        out.append(acc)
    return out


def batch_signatures(increments: np.ndarray, level: int) -> np.ndarray:
    """Signatures for a batch of paths.

    :param increments: array of shape ``(B, M, d)``
    :return: array of shape ``(B, sum_k d^k)`` with levels concatenated
    """
    inc = np.asarray(increments, dtype=np.float64)
    sig = _batch_exp(inc[:, 0, :], level)
    for j in range(1, inc.shape[1]):
        sig = _batch_product(sig, _batch_exp(inc[:, j, :], level))
    return np.concatenate(sig, axis=1)


def _chunk_stats(d, T, M, level, seed, start, stop):
    inc = np.stack([sample_increments(d, T, M, i, seed) for i in range(start, stop)])
    x = batch_signatures(inc, level)
    mean = x.mean(axis=0)
    m2 = np.square(x - mean).sum(axis=0)
    return stop - start, mean, m2


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    na, ma, qa = a
    nb, mb, qb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), qa + qb + np.square(delta) * (na * nb / n)


def _split(flat: np.ndarray, d: int, level: int) -> list[np.ndarray]:
    out, pos = [], 0
    for k in range(level + 1):
        out.append(flat[pos : pos + d**k])
        pos += d**k
    return out


@dataclass(frozen=True)
class McEstimate:
    d: int
    T: object
    M: int
    level: int
    samples: int
    mean: TensorSeries
    stderr: TensorSeries
    exact: TensorSeries
    zscores: TensorSeries  # NaN where the sample variance is zero

    def rows(self):
        """``(word, exact, mean, stderr, z)`` for every word up to the truncation level."""
        for n in range(self.level + 1):
            e, m, s, z = (x.block(n) for x in (self.exact, self.mean, self.stderr, self.zscores))
            for idx in range(self.d**n):
                yield ta.index_word(idx, n, self.d), e[idx], m[idx], s[idx], z[idx]

    def abs_z(self, nonzero_target: bool | None = None) -> np.ndarray:
        vals = []
        for _, e, _, _, z in self.rows():
            if np.isnan(z):
                continue
            if nonzero_target is None or (e != 0) == nonzero_target:
                vals.append(abs(z))
        return np.array(vals)


def estimate_expected_signature(
    d: int, T, M: int, level: int, N: int, master_seed: int, workers: int = 1
) -> McEstimate:
    """Sample mean, standard error and z-scores against the exact phi^M(T)."""
    if N < 2:
        raise ValueError("need at least two samples")
    T = _positive_time(T)
    bounds = [(s, min(s + CHUNK, N)) for s in range(0, N, CHUNK)]
    args = [(d, T, M, level, master_seed, a, b) for a, b in bounds]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _chunk_stats(*a), args))
    else:
        parts = [_chunk_stats(*a) for a in args]
    acc = parts[0]
    for p in parts[1:]:
        acc = _merge(acc, p)
    count, mean, m2 = acc
    var = m2 / (count - 1)
    se = np.sqrt(var / count)
    exact = pwl_expected_signature(d, T, M, level)
    exact_f = np.concatenate([b.astype(np.float64) for b in exact.blocks])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (mean - exact_f) / np.where(se > 0, se, 1.0), np.nan)

    def series(flat):
        return TensorSeries._trusted(d, level, _split(flat.copy(), d, level), "float")

    return McEstimate(d, T, M, level, N, series(mean), series(se), exact, series(z))
