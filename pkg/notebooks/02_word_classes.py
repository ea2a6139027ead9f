# %% [markdown]
# # Word classes
#
# The O(1/M) part of the error lives on a small, explicit set of words.
# Here we list the classes for d = 2 and check their sizes.

# %%
from expsig.words import classify, enumerate_class, word_class_report

print(enumerate_class("E", 2))
print(len(enumerate_class("W", 2, 3)), "words in W_6 for d=2")

# %%
for w in [(1, 1, 2, 2), (1, 2, 1, 2), (1, 1, 1, 2, 2, 1), (1, 2, 2, 2, 2, 1)]:
    print(w, sorted(classify(w, 2)))

# %% [markdown]
# The P^k classes partition the even words by the number of non-square pairs.

# %%
r = word_class_report(3, 3)
print(r.cardinalities)
assert sum(r.cardinalities[f"P^{k}"] for k in range(4)) == r.cardinalities["K"]
