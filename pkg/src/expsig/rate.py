"""Convergence of phi^M(T) to phi(T) in the projective norm.

Everything here is exact; rationals are only turned into floats when a table
is rendered.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from . import tensor as ta
from .expected import _positive_time, brownian_expected_signature, pwl_expected_signature
from .words import class_indices

__all__ = [
    "RateRow",
    "ConcentrationReport",
    "PkAuditRow",
    "diff_norm",
    "symmetry_identity_check",
    "limit_constant",
    "leading_term",
    "concentration_report",
    "rate_table",
    "rate_table_csv",
    "pk_bound_audit",
]


def _check_n_level(n: int, level: int | None) -> int:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if level is None:
        return 2 * n
    if level < 2 * n:
        raise ValueError(f"level {level} too small for level-{2 * n} block")
    return 2 * n


@lru_cache(maxsize=64)
def _pair(d: int, n: int, T: Fraction, M: int):
    # phi and phi^M truncated at 2n: higher levels never enter the rate quantities
    L = 2 * n
    return brownian_expected_signature(d, T, L).block(L), pwl_expected_signature(d, T, M, L).block(L)


def _sum(block, idx) -> Fraction:
    return sum((block[i] for i in idx), Fraction(0))


def diff_norm(d: int, n: int, T, M: int, level: int | None = None) -> Fraction:
    """``||pi_2n(phi(T)) - pi_2n(phi^M(T))||`` with the l1-based projective norm."""
    _check_n_level(n, level)
    T = _positive_time(T)
    phi, phim = _pair(d, n, T, M)
    return sum((abs(a - b) for a, b in zip(phi, phim)), Fraction(0))


def symmetry_identity_check(d: int, n: int, T, M: int, level: int | None = None) -> tuple[Fraction, Fraction]:
    """Both sides of ``||phi - phi^M||_2n = 2 * sum_{K \\ S} C^w(phi^M)``.

    The left side is the norm of the difference of the two tensors; the right
    side only reads phi^M on the non-square even words.
    """
    lhs = diff_norm(d, n, T, M, level)
    T = _positive_time(T)
    _, phim = _pair(d, n, T, M)
    even = set(class_indices("K", d, n).tolist())
    squares = set(class_indices("S", d, n).tolist())
    rhs = 2 * _sum(phim, sorted(even - squares))
    return lhs, rhs


def limit_constant(d: int, n: int, T) -> Fraction:
    """``(d-1) / (3 (n-2)!) * (dT/2)^(n-1)``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    T = _positive_time(T)
    return Fraction(d - 1, 3 * factorial(n - 2)) * (d * T / 2) ** (n - 1)


def leading_term(d: int, n: int, T, M: int) -> Fraction:
    """First-order prediction for the mass on W_2n: ``(d-1) T / (6 M (n-2)!) * (dT/2)^(n-1)``."""
    return limit_constant(d, n, T) * _positive_time(T) / (2 * M)


@dataclass(frozen=True)
class RateRow:
    M: int
    diff_norm: Fraction
    scaled: Fraction
    limit: Fraction
    abs_error: Fraction

    def as_dict(self) -> dict:
        return {
            "M": self.M,
            "diff_norm": _fmt(self.diff_norm),
            "diff_norm_f64": float(self.diff_norm),
            "scaled": _fmt(self.scaled),
            "scaled_f64": float(self.scaled),
            "limit": _fmt(self.limit),
            "limit_f64": float(self.limit),
            "abs_error": _fmt(self.abs_error),
            "abs_error_f64": float(self.abs_error),
        }


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ConcentrationReport:
    d: int
    n: int
    T: Fraction
    M: int
    square_gap: Fraction
    leading_sum: Fraction
    remainder_sum: Fraction
    pk_sums: dict = field(default_factory=dict)

    @property
    def predicted_leading(self) -> Fraction:
        return leading_term(self.d, self.n, self.T, self.M)

    @property
    def concentration(self) -> float:
        total = self.leading_sum + self.remainder_sum
        return float(self.leading_sum / total) if total else 1.0

    def as_dict(self) -> dict:
        out = {
            "d": self.d,
            "n": self.n,
            "T": _fmt(self.T),
            "M": self.M,
        }
        for name in ("square_gap", "leading_sum", "remainder_sum", "predicted_leading"):
            v = getattr(self, name)
            out[name] = _fmt(v)
            out[name + "_f64"] = float(v)
        out["concentration"] = self.concentration
        out["pk_sums"] = {str(k): _fmt(v) for k, v in self.pk_sums.items()}
        return out


def concentration_report(d: int, n: int, T, M: int, level: int | None = None) -> ConcentrationReport:
    """Split the non-square mass of phi^M over W_2n, the rest, and each P^k."""
    _check_n_level(n, level)
    T = _positive_time(T)
    phi, phim = _pair(d, n, T, M)
    sq = class_indices("S", d, n)
    square_gap = sum((phi[i] - phim[i] for i in sq), Fraction(0))
    w_idx = class_indices("W", d, n)
    leading = _sum(phim, w_idx)
    rest = sorted(
        set(class_indices("K", d, n).tolist()) - set(sq.tolist()) - set(w_idx.tolist())
    )
    remainder = _sum(phim, rest)
    pk = {k: _sum(phim, class_indices("P", d, n, k)) for k in range(n + 1)}
    return ConcentrationReport(d, n, T, M, square_gap, leading, remainder, pk)


def rate_table(
    d: int, n: int, T, M_list: Sequence[int], level: int | None = None, workers: int = 1
) -> list[RateRow]:
    """One exact row per ``M``; row order follows ``M_list``."""
    _check_n_level(n, level)
    T = _positive_time(T)
    M_list = [int(m) for m in M_list]
    if not M_list:
        raise ValueError("M_list must be nonempty")
    if any(m < 1 for m in M_list) or M_list != sorted(M_list):
        raise ValueError("M_list must be ascending positive integers")
    lim = limit_constant(d, n, T)

    def row(M: int) -> RateRow:
        dn = diff_norm(d, n, T, M)
        scaled = M * dn / T
        return RateRow(M, dn, scaled, lim, abs(scaled - lim))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(row, M_list))
    return [row(M) for M in M_list]


CSV_COLUMNS = ("M", "diff_norm", "diff_norm_f64", "scaled", "scaled_f64", "limit", "limit_f64", "abs_error_f64")


def rate_table_csv(rows: Sequence[RateRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = r.as_dict()
        d["diff_norm_f64"] = repr(d["diff_norm_f64"])
        d["scaled_f64"] = repr(d["scaled_f64"])
        d["limit_f64"] = repr(d["limit_f64"])
        d["abs_error_f64"] = repr(d["abs_error_f64"])
        writer.writerow(d)
    return buf.getvalue()


@dataclass(frozen=True)
class PkAuditRow:
    k: int
    M: int
    exponent: int
    max_coeff: Fraction
    scaled: Fraction  # max_coeff * M**exponent / T**n


def pk_bound_audit(d: int, n: int, T, M_list: Sequence[int], level: int | None = None) -> list[PkAuditRow]:
    """Largest phi^M coefficient on each nonempty P^k, rescaled by ``M^floor((k+1)/2) / T^n``.

    Only boundedness in ``M`` of the rescaled value is meaningful.
    """
    _check_n_level(n, level)
    T = _positive_time(T)
    rows = []
    for M in M_list:
        _, phim = _pair(d, n, T, M)
        for k in range(n + 1):
            idx = class_indices("P", d, n, k)
            if not len(idx):
                continue
            mx = max(phim[i] for i in idx)
            e = (k + 1) // 2
            rows.append(PkAuditRow(k, M, e, mx, mx * M**e / T**n))
    return rows
