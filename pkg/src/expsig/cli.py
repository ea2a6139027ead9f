"""Command line entry point (``expsig``).

Exit codes: 0 success, 1 identity check failed, 2 invalid arguments.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import tensor as ta
from .expected import as_rational, brownian_expected_signature, pwl_expected_signature
from .montecarlo import estimate_expected_signature
from .rate import (
    concentration_report,
    diff_norm,
    limit_constant,
    rate_table,
    rate_table_csv,
    symmetry_identity_check,
)
from .words import enumerate_class

MAX_LEVEL = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(s: str) -> Fraction:
    try:
        t = as_rational(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if t <= 0:
        raise argparse.ArgumentTypeError(f"T must be positive, got {s}")
    return t


def _dim(s: str) -> int:
    d = int(s)
    if not 2 <= d <= ta.MAX_DIM:
        raise argparse.ArgumentTypeError(f"d must lie in [2, {ta.MAX_DIM}]")
    return d


def _level(s: str) -> int:
    L = int(s)
    if not 0 <= L <= MAX_LEVEL:
        raise argparse.ArgumentTypeError(f"level must lie in [0, {MAX_LEVEL}]")
    return L


def _pos_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _m_list(values) -> list[int]:
    out = []
    for v in values:
        for part in str(v).split(","):
            if part.strip():
                out.append(_pos_int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="expsig", description="Exact expected signatures of Brownian motion and its piecewise-linear approximations.")
    p.add_argument("--threads", type=_pos_int, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    es = sub.add_parser("expected-sig", help="emit phi(T) or phi^M(T) as JSON")
    es.add_argument("kind", choices=["brownian", "pwl"])
    es.add_argument("--d", type=_dim, required=True)
    es.add_argument("--T", type=_rational, required=True)
    es.add_argument("--M", type=_pos_int)
    es.add_argument("--level", type=_level, required=True)
    es.add_argument("--out")

    w = sub.add_parser("words", help="list a word class")
    w.add_argument("--class", dest="cls", required=True, choices=["S", "K", "E", "W", "P"])
    w.add_argument("--d", type=_dim, required=True)
    w.add_argument("--n", type=int)
    w.add_argument("--k", type=int)
    w.add_argument("--out")

    r = sub.add_parser("rate-table", help="exact convergence table")
    r.add_argument("--d", type=_dim, required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--T", type=_rational, required=True)
    r.add_argument("--M", nargs="+", required=True)
    r.add_argument("--csv")
    r.add_argument("--json")

    c = sub.add_parser("concentration", help="split of the error over word classes")
    c.add_argument("--d", type=_dim, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--T", type=_rational, required=True)
    c.add_argument("--M", type=_pos_int, required=True)
    c.add_argument("--json")

    mc = sub.add_parser("mc-verify", help="Monte Carlo comparison against exact phi^M")
    mc.add_argument("--d", type=_dim, required=True)
    mc.add_argument("--T", type=_rational, required=True)
    mc.add_argument("--M", type=_pos_int, required=True)
    mc.add_argument("--level", type=_level, required=True)
    mc.add_argument("--samples", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--json")

    ck = sub.add_parser("check", help="run the exact identity checks")
    ck.add_argument("--d", type=_dim, required=True)
    ck.add_argument("--n", type=int, required=True)
    ck.add_argument("--T", type=_rational, required=True)
    ck.add_argument("--M", type=_pos_int, required=True)
    return p


def _emit(text: str, path: str | None, out) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
        if not text.endswith("\n"):
            out.write("\n")


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _cmd_expected_sig(a, out):
    if a.kind == "pwl":
        if a.M is None:
            raise UsageError("expected-sig pwl requires --M")
        s = pwl_expected_signature(a.d, a.T, a.M, a.level)
    else:
        s = brownian_expected_signature(a.d, a.T, a.level)
    _emit(ta.to_json(s), a.out, out)
    return 0


def _cmd_words(a, out):
    n = a.n
    if a.cls == "E":
        n = 2
    elif n is None:
        raise UsageError(f"class {a.cls} requires --n")
    if a.cls == "P" and a.k is None:
        raise UsageError("class P requires --k")
    try:
        words = enumerate_class(a.cls, a.d, n, a.k)
    except ValueError as exc:
        raise UsageError(str(exc))
    name = a.cls if a.k is None else f"{a.cls}^{a.k}"
    doc = {"class": name, "d": a.d, "n": n, "count": len(words), "words": [ta.word_to_str(w) for w in words]}
    _emit(json.dumps(doc), a.out, out)
    return 0


def _check_n(n: int):
    if n < 2 or 2 * n > MAX_LEVEL:
        raise UsageError(f"n must satisfy 2 <= n <= {MAX_LEVEL // 2}")


def _cmd_rate_table(a, out, threads):
    _check_n(a.n)
    try:
        Ms = _m_list(a.M)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))
    if Ms != sorted(Ms):
        raise UsageError("--M values must be ascending")
    rows = rate_table(a.d, a.n, a.T, Ms, workers=threads)
    if a.json:
        doc = {"d": a.d, "n": a.n, "T": _fmt(a.T), "rows": [r.as_dict() for r in rows]}
        _emit(json.dumps(doc, indent=1), a.json, out)
    if a.csv or not a.json:
        _emit(rate_table_csv(rows), a.csv, out)
    return 0


def _cmd_concentration(a, out):
    _check_n(a.n)
    rep = concentration_report(a.d, a.n, a.T, a.M)
    _emit(json.dumps(rep.as_dict(), indent=1), a.json, out)
    return 0


def _num(x):
    x = float(x)
    return None if np.isnan(x) else x


def _cmd_mc(a, out, threads):
    if a.samples < 2:
        raise UsageError("--samples must be >= 2")
    if a.level < 1:
        raise UsageError("--level must be >= 1")
    est = estimate_expected_signature(a.d, a.T, a.M, a.level, a.samples, a.seed, workers=threads)
    rows = []
    for w, e, m, s, z in est.rows():
        rows.append({"word": ta.word_to_str(w), "exact": _fmt(e), "exact_f64": float(e), "mean": float(m), "stderr": float(s), "zscore": _num(z)})
    az = est.abs_z()
    az_nz = est.abs_z(nonzero_target=True)
    summary = {
        "abs_z_quantiles": {q: float(np.quantile(az, float(q))) for q in ("0.5", "0.9", "0.95", "0.99", "1.0")},
        "nonzero_target_frac_abs_z_le_2": float((az_nz <= 2).mean()) if az_nz.size else None,
        "max_abs_z": float(az.max()),
    }
    doc = {"d": a.d, "T": _fmt(a.T), "M": a.M, "level": a.level, "samples": a.samples, "seed": a.seed, "coefficients": rows, "summary": summary}
    _emit(json.dumps(doc, indent=1), a.json, out)
    return 0


def run_checks(d: int, n: int, T, M: int) -> list[tuple[str, bool]]:
    """Exact identity checks; each entry is ``(description, passed)``."""
    from math import factorial

    results = []
    L = 2 * n
    phi = brownian_expected_signature(d, T, L)
    phim = pwl_expected_signature(d, T, M, L)
    results.append(("level-2 blocks agree", np.array_equal(phi.block(2), phim.block(2))))
    odd_zero = all(not s.block(k).any() for s in (phi, phim) for k in range(1, L + 1, 2))
    results.append(("odd levels vanish", odd_zero))
    for m in range(1, n + 1):
        target = Fraction(1, factorial(m)) * (d * T / 2) ** m
        ok = ta.projective_norm(phi, 2 * m) == target == ta.projective_norm(phim, 2 * m)
        results.append((f"norm equality at level {2 * m}", ok))
    for m in range(2, n + 1):
        lhs, rhs = symmetry_identity_check(d, m, T, M)
        results.append((f"symmetry identity at level {2 * m}", lhs == rhs))
    scaled = M * diff_norm(d, 2, T, M) / T
    results.append(("n=2 scaled error equals limit", scaled == limit_constant(d, 2, T)))
    return results


def _cmd_check(a, out):
    _check_n(a.n)
    results = run_checks(a.d, a.n, a.T, a.M)
    for name, ok in results:
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}\n")
    return 0 if all(ok for _, ok in results) else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = build_parser().parse_args(argv)
        if a.command == "expected-sig":
            return _cmd_expected_sig(a, out)
        if a.command == "words":
            return _cmd_words(a, out)
        if a.command == "rate-table":
            return _cmd_rate_table(a, out, a.threads)
        if a.command == "concentration":
            return _cmd_concentration(a, out)
        if a.command == "mc-verify":
            return _cmd_mc(a, out, a.threads)
        return _cmd_check(a, out)
    except UsageError as exc:
        sys.stderr.write(f"expsig: error: {exc}\n")
        return 2


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
