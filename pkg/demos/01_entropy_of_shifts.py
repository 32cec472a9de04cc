# %% [markdown]
# Entropy of shift spaces from word counts.
#
# The golden-mean shift forbids "11". Its language grows like the Fibonacci
# numbers, so the entropy is the log of the golden ratio.

# %%
import math

from symentropy import (CoverSpec, DigitSetSchedule, SubshiftSpec, count_words,
                        estimate_cover_entropy, spectral_entropy)

gm = SubshiftSpec.golden_mean()
print([count_words(gm, None, n) for n in range(1, 11)])
print("spectral:", spectral_entropy(gm), "exact:", math.log((1 + 5 ** 0.5) / 2))

# %% [markdown]
# The separated-set estimator fits a slope to log s_n. Every row also carries
# the cover counts that sandwich s_n.

# %%
est = estimate_cover_entropy(gm, n_max=24)
print(f"estimate {est.value:.6f}, residual {est.residual:.1e}, sandwich ok: {est.extra['sandwich_ok']}")
for row in est.rows[:6]:
    print(row)

# %% [markdown]
# Restricting to a digit schedule: even coordinates free, odd ones pinned to 0.
# Half of the coordinates carry a bit, so the entropy halves.

# %%
full2 = SubshiftSpec.full(2)
K = DigitSetSchedule.periodic(2, [{0, 1}, {0}])
print([count_words(full2, K, n) for n in range(1, 9)])
print("h(T, K) ~", estimate_cover_entropy(full2, K).value, "vs", math.log(2) / 2)

# %% [markdown]
# Powers scale linearly: h(T^j) = j h(T).

# %%
for j in (1, 2, 3):
    print(j, round(estimate_cover_entropy(gm, power=j).value, 4))

# %% [markdown]
# Conditional entropy of covers: refining the reference cover kills it.

# %%
from symentropy import conditional_cover_entropy

b1, b2 = CoverSpec.blocks(1), CoverSpec.blocks(2)
print("h(U2 | trivial) =", conditional_cover_entropy(full2, b2, CoverSpec.trivial()).value)
print("h(U1 | U2)      =", conditional_cover_entropy(full2, b1, b2).value)
