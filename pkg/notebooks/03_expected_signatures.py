# %% [markdown]
# # Expected signatures
#
# `phi(T)` for Brownian motion, `phi^1(t)` for one linear segment and
# `phi^M(T) = phi^1(T/M)^{⊗M}` for the M-piece interpolant, all exact.

# %%
from fractions import Fraction

from expsig.expected import (
    brownian_expected_signature,
    coefficient_by_decomposition,
    lambda_coefficient,
    pwl_expected_signature,
)

T = Fraction(1)
phi = brownian_expected_signature(2, T, 4)
phi2 = pwl_expected_signature(2, T, 2, 4)
for w in ["11", "1122", "1212", "1221"]:
    print(w, phi[w], phi2[w])

# %% [markdown]
# The one-segment coefficient depends on the word only through its letter
# counts.  The decomposition oracle sums over every split of the word across
# the M pieces and reproduces the tensor power exactly.

# %%
print(lambda_coefficient((1, 2, 1, 2), 2), lambda_coefficient((1, 1, 1, 1), 2))
print(coefficient_by_decomposition((1, 1, 2, 2), 2, T, 2))
assert coefficient_by_decomposition((1, 1, 2, 2), 2, T, 2) == phi2["1122"]
