from fractions import Fraction

import pytest

from expsig.expected import coefficient_by_decomposition
from expsig.rate import (
    concentration_report,
    diff_norm,
    leading_term,
    limit_constant,
    pk_bound_audit,
    rate_table,
    rate_table_csv,
    symmetry_identity_check,
)

from oracles import all_words, brownian_closed_form


def oracle_diff_norm(d, n, T, M):
    return sum(
        abs(brownian_closed_form(w, T) - coefficient_by_decomposition(w, d, T, M)) for w in all_words(d, 2 * n)
    )


def n2_closed_form(d, T, M):
    # K_4 \ S_4 = E; only whole-block splits survive: 2 * |E| * M * (1/6)(dt/2)^2
    T = Fraction(T)
    return Fraction(d * (d - 1)) * T**2 / (6 * M)


def test_diff_norm_examples():
    assert diff_norm(2, 2, 1, 10) == Fraction(1, 30)
    # frozen from oracle_diff_norm(2, 3, 1, 8)
    assert diff_norm(2, 3, 1, 8) == Fraction(19, 480)
    assert diff_norm(2, 3, 1, 8) > 0


@pytest.mark.parametrize("d,n,M", [(2, 2, 3), (2, 3, 8), (3, 2, 5), (3, 3, 4), (2, 4, 2)])
def test_diff_norm_matches_decomposition_oracle(d, n, M):
    assert diff_norm(d, n, 1, M) == oracle_diff_norm(d, n, 1, M)


def test_diff_norm_level_guard():
    with pytest.raises(ValueError):
        diff_norm(2, 3, 1, 4, level=5)
    with pytest.raises(ValueError):
        diff_norm(2, 1, 1, 4)


def test_symmetry_identity_examples():
    assert symmetry_identity_check(2, 2, 1, 3) == (Fraction(1, 9), Fraction(1, 9))
    assert symmetry_identity_check(3, 2, 1, 4) == (Fraction(1, 4), Fraction(1, 4))
    lhs, rhs = symmetry_identity_check(3, 3, Fraction(3, 2), 1)
    assert lhs == rhs


def test_limit_constant_examples():
    assert limit_constant(2, 2, 1) == Fraction(1, 3)
    assert limit_constant(3, 3, 2) == 6
    assert limit_constant(2, 4, 1) == Fraction(1, 6)
    with pytest.raises(ValueError):
        limit_constant(2, 1, 1)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("T", [1, Fraction(3, 2)])
def test_n2_scaled_error_is_exact(d, T):
    for M in range(1, 9):
        assert diff_norm(d, 2, T, M) == n2_closed_form(d, T, M)
        assert M * diff_norm(d, 2, T, M) / Fraction(T) == limit_constant(d, 2, T)


def test_concentration_n2_has_no_remainder():
    for M in (1, 2, 5, 9):
        r = concentration_report(2, 2, 1, M)
        assert r.remainder_sum == 0
        assert r.square_gap == r.leading_sum


@pytest.mark.parametrize("d,n,M", [(2, 3, 4), (3, 3, 2), (2, 4, 5), (3, 4, 3)])
def test_concentration_partition(d, n, M):
    r = concentration_report(d, n, 1, M)
    assert r.square_gap == r.leading_sum + r.remainder_sum
    assert r.square_gap >= 0 and r.leading_sum >= 0 and r.remainder_sum >= 0
    assert sum(v for k, v in r.pk_sums.items() if k > 0) == r.leading_sum + r.remainder_sum
    assert r.pk_sums[1] == 0


def test_leading_sum_first_order():
    # M * leading_sum -> (d-1) T / (6 (n-2)!) (dT/2)^(n-1), gap shrinking like 1/M
    target = leading_term(2, 3, 1, 1)
    g16 = abs(16 * concentration_report(2, 3, 1, 16).leading_sum - target)
    g32 = abs(32 * concentration_report(2, 3, 1, 32).leading_sum - target)
    assert g32 < g16
    assert g32 * 32 == pytest.approx(float(g16 * 16), rel=0.2)


def test_rate_table_n2_exact():
    rows = rate_table(2, 2, 1, [1, 2, 4, 8])
    assert all(r.scaled == Fraction(1, 3) for r in rows)
    assert all(r.abs_error == 0 for r in rows)
    assert len({r.limit for r in rows}) == 1


def test_rate_table_n3_halving():
    rows = rate_table(2, 3, 1, [4, 8, 16, 32])
    errs = [r.abs_error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    for a, b in zip(errs, errs[1:]):
        assert 0.4 < float(b / a) < 0.6


def test_rate_table_workers_keep_order():
    assert rate_table(2, 3, 1, [1, 2, 3, 5], workers=3) == rate_table(2, 3, 1, [1, 2, 3, 5])


def test_rate_table_validation():
    with pytest.raises(ValueError):
        rate_table(2, 3, 1, [])
    with pytest.raises(ValueError):
        rate_table(2, 3, 1, [4, 2])


def test_rate_table_csv_columns():
    text = rate_table_csv(rate_table(2, 2, 1, [1, 2]))
    lines = text.strip().split("\n")
    assert lines[0] == "M,diff_norm,diff_norm_f64,scaled,scaled_f64,limit,limit_f64,abs_error_f64"
    assert lines[2].split(",")[:2] == ["2", "1/6"]


def test_pk_audit_bounded():
    for d, n, k in [(2, 3, 2), (3, 3, 3), (3, 3, 2)]:
        rows = [r for r in pk_bound_audit(d, n, 1, [4, 8, 16, 32]) if r.k == k]
        vals = [r.scaled for r in rows]
        assert len(vals) == 4
        assert max(vals) <= 2 * vals[0]
    sq = [r for r in pk_bound_audit(2, 3, 1, [4, 8, 16]) if r.k == 0]
    assert all(r.scaled > 0 for r in sq)
    assert all(r.k != 1 for r in pk_bound_audit(2, 3, 1, [4]))
