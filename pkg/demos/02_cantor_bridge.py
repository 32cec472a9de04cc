# %% [markdown]
# Cantor sets on the circle: Hausdorff dimension vs dimensional entropy.
#
# Digits {0, 2} in base 3 give the middle-thirds Cantor set. The dimension is
# log 2 / log 3 and should equal h^B(T_3, C) / log 3, computed by a completely
# separate route (weighted cylinder covers on the shift).

# %%
import math

from symentropy import (CircleSet, DigitSetSchedule, box_count_dimension, bridge_check,
                        dim_entropy, hausdorff_dimension, hausdorff_measure_approx,
                        project_intervals)

C = CircleSet.digits(3, [0, 2])
print(project_intervals(C, 2))
print("closed form:", hausdorff_dimension(C).value, " log2/log3:", math.log(2) / math.log(3))
print("box count  :", box_count_dimension(C).value)

# %% [markdown]
# The t-measure jumps at the dimension. Bounds at shrinking delta:

# %%
t0 = math.log(2) / math.log(3)
for t in (t0 - 0.1, t0, t0 + 0.1):
    print(f"t = {t:.4f}", [hausdorff_measure_approx(C, t, 3.0 ** -j) for j in (5, 15, 25)])

# %% [markdown]
# Dimensional entropy of the same set, by bisection on the exponent.

# %%
r = dim_entropy(C.shift, C.source, tol=1e-3)
print("h^B bracket:", r.lower, r.upper, " / log 3 =", r.mid / math.log(3))

# %% [markdown]
# The bridge report puts both numbers side by side.

# %%
sets = {
    "cantor": C,
    "circle": CircleSet.circle(2),
    "half free": CircleSet(DigitSetSchedule.periodic(2, [{0, 1}, {0}]), 2),
    "point": CircleSet(DigitSetSchedule.point(2, (0, 1)), 2),
}
for name, S in sets.items():
    rep = bridge_check(S)
    print(f"{name:10s} H_d {rep['H_d']:.5f}  h^B/log m {rep['hB_over_logm']:.5f}  gap {rep['gap']:+.1e}")
