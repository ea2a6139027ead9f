"""Exact expected signatures of Brownian motion and its piecewise-linear interpolants."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import tensor as ta
from .tensor import TensorSeries, _check_dim, parse_word

__all__ = [
    "ExpectedSignatureSpec",
    "as_rational",
    "brownian_expected_signature",
    "lambda_coefficient",
    "one_step_coefficient",
    "one_step_expected_signature",
    "pwl_expected_signature",
    "coefficient_by_decomposition",
    "MAX_ORACLE_WORD",
    "MAX_ORACLE_PIECES",
]

MAX_ORACLE_WORD = 8
MAX_ORACLE_PIECES = 64


def as_rational(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not times")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise ValueError(f"decimal input {x!r} rejected; give an exact rational like '3/2'")
        return Fraction(s)
    raise TypeError(f"expected an exact rational, got {type(x).__name__} {x!r}")


def _positive_time(t) -> Fraction:
    t = as_rational(t)
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    return t


@dataclass(frozen=True)
class ExpectedSignatureSpec:
    """Parameters of phi(T) (``M is None``) or phi^M(T)."""

    d: int
    T: Fraction
    level: int
    M: int | None = None

    def __post_init__(self):
        _check_dim(self.d)
        object.__setattr__(self, "T", _positive_time(self.T))
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if self.M is not None and self.M < 1:
            raise ValueError("M must be >= 1")

    @property
    def dt(self) -> Fraction:
        return self.T / (self.M or 1)

    def build(self) -> TensorSeries:
        if self.M is None:
            return brownian_expected_signature(self.d, self.T, self.level)
        return pwl_expected_signature(self.d, self.T, self.M, self.level)


def brownian_expected_signature(d: int, T, level: int) -> TensorSeries:
    """phi(T) = exp((T/2) sum_j e_j ⊗ e_j), truncated at ``level``."""
    _check_dim(d)
    T = _positive_time(T)
    if level < 2:
        return ta.unit(d, level)
    half = T / 2
    gen = ta.from_terms(d, level, {(j, j): half for j in range(1, d + 1)})
    return ta.exp(gen)


@lru_cache(maxsize=None)
def _lambda_from_half_counts(half_counts: tuple[int, ...]) -> Fraction:
    n = sum(half_counts)
    multi_n = factorial(n)
    multi_2n = factorial(2 * n)
    for i in half_counts:
        multi_n //= factorial(i)
        multi_2n //= factorial(2 * i)
    return Fraction(multi_n, multi_2n)


def lambda_coefficient(w: Sequence[int], d: int) -> Fraction:
    """Multinomial ratio ``(n; i_1..i_d) / (2n; 2i_1..2i_d)`` for a word with counts ``2 i_k``."""
    w = parse_word(w, d)
    counts = [0] * d
    for c in w:
        counts[c - 1] += 1
    if any(c % 2 for c in counts):
        raise ValueError(f"lambda is only defined when every letter count is even, got {counts}")
    return _lambda_from_half_counts(tuple(c // 2 for c in counts))


def one_step_coefficient(w: Sequence[int], d: int, t) -> Fraction:
    """Coefficient of ``w`` in phi^1(t); zero whenever some letter count is odd."""
    w = parse_word(w, d)
    counts = [0] * d
    for c in w:
        counts[c - 1] += 1
    if any(c % 2 for c in counts):
        return Fraction(0)
    n = len(w) // 2
    lam = _lambda_from_half_counts(tuple(c // 2 for c in counts))
    return lam / factorial(n) * (Fraction(t) / 2) ** n


def _count_vectors(d: int, length: int) -> np.ndarray:
    # letter counts of every word at this level, rows in index order
    digits = np.array(list(iproduct(range(d), repeat=length)), dtype=np.int64).reshape(-1, length)
    return np.stack([(digits == j).sum(axis=1) for j in range(d)], axis=1)


def one_step_expected_signature(d: int, t, level: int) -> TensorSeries:
    """phi^1(t): expected signature of one linear segment with Gaussian increment.

    Level ``2n`` carries ``lambda_w / n! * (t/2)^n`` on even-count words; odd
    levels vanish.
    """
    _check_dim(d)
    t = _positive_time(t)
    blocks = [ta._zeros(d**k, "rational") for k in range(level + 1)]
    blocks[0][0] = Fraction(1)
    for L in range(2, level + 1, 2):
        n = L // 2
        scale = (t / 2) ** n / factorial(n)
        counts = _count_vectors(d, L)
        even = ~(counts % 2).any(axis=1)
        cache: dict[tuple, Fraction] = {}
        block = blocks[L]
        for idx in np.flatnonzero(even):
            key = tuple(int(c) // 2 for c in counts[idx])
            val = cache.get(key)
            if val is None:
                val = cache[key] = _lambda_from_half_counts(key) * scale
            block[idx] = val
    return TensorSeries._trusted(d, level, blocks, "rational")


def pwl_expected_signature(d: int, T, M: int, level: int) -> TensorSeries:
    """phi^M(T) = phi^1(T/M)^{⊗M}, exact."""
    T = _positive_time(T)
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    return ta.power(one_step_expected_signature(d, T / M, level), int(M))


def _compositions(L: int):
    """Yield the cut points of every composition of ``L`` into nonempty parts."""
    for mask in range(1 << max(L - 1, 0)):
        cuts = [0] + [i + 1 for i in range(L - 1) if mask >> i & 1] + [L]
        yield cuts


def coefficient_by_decomposition(w: Sequence[int], d: int, T, M: int) -> Fraction:
    """C^w(phi^M(T)) by summing over every ordered split of ``w`` into ``M`` factors.

    Splits that differ only in where the empty factors sit are grouped: a
    split into ``j`` nonempty consecutive factors can be placed on the ``M``
    pieces in ``comb(M, j)`` ways.  Independent of the tensor product code.
    """
    w = parse_word(w, d)
    T = _positive_time(T)
    if len(w) > MAX_ORACLE_WORD:
        raise ValueError(f"word length {len(w)} exceeds oracle bound {MAX_ORACLE_WORD}")
    if not 1 <= M <= MAX_ORACLE_PIECES:
        raise ValueError(f"M={M} outside oracle bound [1, {MAX_ORACLE_PIECES}]")
    dt = T / M
    if not w:
        return Fraction(1)
    total = Fraction(0)
    for cuts in _compositions(len(w)):
        j = len(cuts) - 1
        if j > M:
            continue
        term = Fraction(comb(M, j))
        for a, b in zip(cuts, cuts[1:]):
            term *= one_step_coefficient(w[a:b], d, dt)
            if not term:
                break
        total += term
    return total
