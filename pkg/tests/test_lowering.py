import math

import numpy as np
import pytest

from symentropy import (DigitSetSchedule, LoweringRequest, NotMixing, ProductExperiment,
                        SubshiftSpec, TargetOutOfRange, certify, count_words, diagonal_experiment,
                        lower, lower_in_full_shift, lower_in_sft, lower_within_subset, moran_oracle)
from symentropy.lowering import exact_entropy

LOG2 = math.log(2)
PHI = math.log((1 + 5 ** 0.5) / 2)


def test_full_shift_examples(full2):
    K = lower_in_full_shift(LoweringRequest(full2, 0.0))
    assert moran_oracle(K) == 0.0
    K = lower_in_full_shift(LoweringRequest(full2, LOG2))
    assert moran_oracle(K) == pytest.approx(LOG2)
    K = lower_in_full_shift(LoweringRequest(full2, 0.4 * LOG2))
    assert K.q == 5 and sum(len(a) == 2 for a in K.period) == 2


def test_full_shift_word_counts(full2):
    K = lower_in_full_shift(LoweringRequest(full2, 0.4 * LOG2))
    for n in range(5, 30):
        c = count_words(full2, K, n)
        assert abs(math.log2(c) - 0.4 * n) <= 1.0 + 1e-9


def test_random_targets_hit_tolerance():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = int(rng.integers(2, 6))
        target = float(rng.uniform(0, math.log(m)))
        K = lower(LoweringRequest(SubshiftSpec.full(m), target, 1e-3))
        assert abs(moran_oracle(K) - target) <= 1e-3


def test_out_of_range(full2):
    with pytest.raises(TargetOutOfRange):
        lower(LoweringRequest(full2, 1.0))
    with pytest.raises(TargetOutOfRange):
        LoweringRequest(full2, -0.1)


def test_sft_examples(golden):
    K = lower_in_sft(LoweringRequest(golden, 0.0, 1e-3))
    assert exact_entropy(golden, K) == 0.0 and all(a == {0} for a in K.period)
    K = lower_in_sft(LoweringRequest(golden, PHI, 1e-3))
    assert K == DigitSetSchedule.full(2)
    K = lower_in_sft(LoweringRequest(golden, 0.24, 1e-3))
    assert exact_entropy(golden, K) == pytest.approx(0.24, abs=1e-3)


def test_sft_certificate(golden):
    K = lower_in_sft(LoweringRequest(golden, 0.24, 1e-3))
    rep = certify(golden, K, 0.24, 0.05, n_max=2 * K.q, dim_tol=2e-2)
    assert rep["exact_ok"] and rep["hB_ok"]
    assert rep["cover_estimate"] == pytest.approx(0.24, abs=0.05)


def test_sft_must_be_mixing():
    flip = SubshiftSpec.from_matrix([[0, 1], [1, 0]])
    with pytest.raises(NotMixing):
        lower_in_sft(LoweringRequest(flip, 0.0))


def test_within_subset_examples():
    X3 = SubshiftSpec.full(3)
    C = DigitSetSchedule.digits(3, [0, 2])
    K = lower_within_subset(LoweringRequest(X3, 0.0, within=C))
    assert moran_oracle(K) == 0.0 and all(a == {0} for a in K.period)
    K = lower_within_subset(LoweringRequest(X3, LOG2, within=C))
    assert moran_oracle(K) == pytest.approx(LOG2)
    K = lower_within_subset(LoweringRequest(X3, LOG2 / 2, within=C))
    assert K.period == (frozenset({0, 2}), frozenset({0}))


def test_within_subset_is_contained():
    X3 = SubshiftSpec.full(3)
    C = DigitSetSchedule.periodic(3, [{0, 2}, {1}, {0, 1, 2}], preperiod=[{2}])
    for target in (0.1, 0.3, 0.5):
        K = lower_within_subset(LoweringRequest(X3, target, within=C))
        assert K.positionwise_subset_of(C)
        assert all(K.allowed(-i) <= C.allowed(-i) for i in range(1, 30))
        assert abs(moran_oracle(K) - target) <= 1e-3


def test_diagonal_examples(golden):
    fixed = SubshiftSpec.full(1)
    r = diagonal_experiment(ProductExperiment(fixed, 3))
    assert r["estimate"] == 0.0
    r = diagonal_experiment(ProductExperiment(golden, 2))
    assert 2 * PHI - 0.05 <= r["estimate"] <= 3 * PHI + 0.05
    r = diagonal_experiment(ProductExperiment(golden, 3))
    assert r["lower_bound_check"] and r["upper_bound_check"]
    assert r["lower_bound_growth"][-1] >= PHI - 0.05
    est = [e["estimate"] for e in r["estimates"]]
    assert est[2] - est[1] >= PHI - 0.05
