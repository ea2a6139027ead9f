# %% [markdown]
# # Truncated tensor algebra
#
# `TensorSeries` holds one dense block per level, indexed by words written as
# digit strings.  Scalars are exact `Fraction`s unless you ask for floats.

# %%
from fractions import Fraction

from expsig import tensor as ta

a = ta.from_terms(2, 3, {"": 1, "1": 1})
b = ta.from_terms(2, 3, {"": 1, "2": 1})
ab = a * b
print(dict((ta.word_to_str(w), c) for w, c in ab.terms()))

# %% [markdown]
# The exponential of a level-one element is the signature of a straight line.
# Its level-k block is the k-fold outer power divided by k!.

# %%
line = ta.exp(ta.from_terms(2, 4, {"1": Fraction(1, 2), "2": -1}))
print(line["12"], line["1122"])

# %% [markdown]
# Powers use repeated squaring and agree exactly with a naive loop.

# %%
naive = line
for _ in range(4):
    naive = naive * line
assert ta.power(line, 5) == naive

# %% [markdown]
# With l1 on R^d the projective norm is the sum of absolute coefficients.
# The Hilbert-Schmidt norm is returned as a float.

# %%
lie = ta.from_terms(2, 2, {"12": 1, "21": -1})
print(ta.projective_norm(lie, 2), ta.hs_norm(lie, 2))
print(ta.to_json(lie))
