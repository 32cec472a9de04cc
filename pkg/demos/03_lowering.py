# %% [markdown]
# Lowering entropy: any value in [0, h] is hit by a periodic schedule.
#
# In a full shift the schedule pins some positions to 0 and leaves the rest free,
# so its entropy is (free / period) log m exactly.

# %%
import math

from symentropy import (DigitSetSchedule, LoweringRequest, ProductExperiment, SubshiftSpec,
                        certify, diagonal_experiment, lower, moran_oracle)

full2 = SubshiftSpec.full(2)
for target in (0.1, 0.4 * math.log(2), 0.5):
    K = lower(LoweringRequest(full2, target, tol=1e-3))
    print(f"target {target:.5f} -> period {K.q}, exact {moran_oracle(K):.5f}")

# %% [markdown]
# In the golden-mean shift pinned blocks follow a cycle of the graph, and the
# exact rate is a spectral radius. Both estimators confirm it.

# %%
gm = SubshiftSpec.golden_mean()
K = lower(LoweringRequest(gm, 0.24, tol=1e-3))
print("period", K.q)
print(certify(gm, K, 0.24, 1e-3, dim_tol=1e-2))

# %% [markdown]
# Lowering inside a Cantor-type subset keeps the output inside it.

# %%
C = DigitSetSchedule.digits(3, [0, 2])
K = lower(LoweringRequest(SubshiftSpec.full(3), math.log(2) / 2, within=C))
print(K.period, K.positionwise_subset_of(C))

# %% [markdown]
# Diagonal of T x T^2 x ... x T^N: entropy at least N h and growing with N.

# %%
for N in (1, 2, 3, 4):
    r = diagonal_experiment(ProductExperiment(gm, N))
    print(N, round(r["estimate"], 4), "bounds", round(N * r["h_base"], 4),
          round(N * (N + 1) / 2 * r["h_base"], 4))
