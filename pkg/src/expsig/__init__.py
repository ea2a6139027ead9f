"""Exact expected signatures of Brownian motion and of its piecewise-linear
approximations, with the tools to study how fast the latter converge."""

from .tensor import (
    TensorSeries,
    exp,
    from_json,
    from_terms,
    hs_norm,
    power,
    product,
    projection,
    projective_norm,
    to_json,
    unit,
)
from .words import classify, enumerate_class, letter_counts, nonsquare_pair_count, word_class_report
from .expected import (
    brownian_expected_signature,
    coefficient_by_decomposition,
    lambda_coefficient,
    one_step_expected_signature,
    pwl_expected_signature,
)
from .rate import (
    concentration_report,
    diff_norm,
    limit_constant,
    pk_bound_audit,
    rate_table,
    symmetry_identity_check,
)
from .montecarlo import estimate_expected_signature, sample_pwl_signature

__version__ = "0.1.0"
