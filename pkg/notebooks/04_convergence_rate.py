# %% [markdown]
# # The 1/M rate and where the error sits
#
# `(M/T) ||pi_2n(phi - phi^M)||` converges to `(d-1)/(3 (n-2)!) (dT/2)^(n-1)`.
# At n = 2 it equals the limit for every M.

# %%
from expsig.rate import concentration_report, pk_bound_audit, rate_table, rate_table_csv

print(rate_table_csv(rate_table(2, 2, 1, [1, 2, 4, 8])))
print(rate_table_csv(rate_table(2, 3, 1, [8, 16, 32, 64, 128])))

# %% [markdown]
# Nearly all of the non-square mass sits on W_2n; what is left decays like 1/M^2.

# %%
for M in (8, 16, 32, 64):
    r = concentration_report(2, 3, 1, M)
    print(M, float(r.leading_sum), float(r.remainder_sum * M * M), round(r.concentration, 4))

# %%
for row in pk_bound_audit(3, 3, 1, [4, 8, 16, 32]):
    print(row.k, row.M, float(row.scaled))
