import math

import pytest
from hypothesis import given, settings, strategies as st

from symentropy import (EMPTY, BlockCode, CoverSpec, DigitSetSchedule, LocalBallSpec,
                        SubshiftSpec, conditional_cover_entropy, estimate_cover_entropy,
                        image_cover_entropy, local_entropy, min_subcover_count,
                        relative_entropy_over_factor, separated_spanning_counts)
from symentropy.cover import brute_force_separated, image_word_counts, slope_fit

LOG2 = math.log(2)
PHI = math.log((1 + 5 ** 0.5) / 2)


def test_min_subcover_examples(full2, half_free):
    U = CoverSpec.blocks(1)
    assert min_subcover_count(full2, U, None, 5) == 32
    assert min_subcover_count(full2, U, EMPTY, 5) == 1
    assert min_subcover_count(full2, U, half_free, 4) == 4


def test_separated_examples(full2):
    assert separated_spanning_counts(full2, None, 3, 0.6) == (8, 8)
    assert separated_spanning_counts(full2, EMPTY, 7, 0.1) == (1, 1)
    point = DigitSetSchedule.point(2, (0,))
    assert separated_spanning_counts(full2, point, 10, 0.25) == (1, 1)


@pytest.mark.parametrize("n,eps", [(1, 0.6), (2, 0.3), (3, 0.6), (4, 0.3)])
def test_separated_matches_brute_force(golden, n, eps):
    s, r = separated_spanning_counts(golden, None, n, eps)
    assert s == r == brute_force_separated(golden, None, n, eps)


def test_estimates(full2, golden, half_free):
    assert estimate_cover_entropy(full2).value == pytest.approx(LOG2, abs=0.01)
    assert estimate_cover_entropy(golden).value == pytest.approx(PHI, abs=0.02)
    est = estimate_cover_entropy(full2, half_free)
    assert est.value == pytest.approx(LOG2 / 2, abs=0.02)
    assert est.extra["sandwich_ok"]


def test_estimate_empty_is_zero(full2):
    est = estimate_cover_entropy(full2, EMPTY)
    assert est.value == 0.0 and est.exact


def test_sandwich_rows_are_ordered(golden):
    est = estimate_cover_entropy(golden, n_max=12)
    for row in est.rows:
        assert row["N_lower"] <= row["r_n"] <= row["s_n"] <= row["N_upper"]


def test_conditional_examples(full2):
    b1, b2 = CoverSpec.blocks(1), CoverSpec.blocks(2)
    assert conditional_cover_entropy(full2, b1, b1).value == pytest.approx(0, abs=1e-9)
    assert conditional_cover_entropy(full2, b2, CoverSpec.trivial()).value == pytest.approx(LOG2, abs=0.01)
    assert conditional_cover_entropy(full2, b1, b2).value == pytest.approx(0, abs=1e-9)


def test_relative_entropy_examples(golden):
    X4, X2, X1 = SubshiftSpec.full(4), SubshiftSpec.full(2), SubshiftSpec.full(1)
    assert relative_entropy_over_factor(BlockCode.identity(golden)).value == pytest.approx(0, abs=1e-9)
    collapse = BlockCode.from_function(0, lambda w: 0, golden, X1)
    assert relative_entropy_over_factor(collapse).value == pytest.approx(PHI, abs=0.02)
    pairing = BlockCode.from_function(0, lambda w: w[0] % 2, X4, X2)
    assert relative_entropy_over_factor(pairing).value == pytest.approx(LOG2, abs=0.01)


def test_image_word_counts_match_enumeration(golden):
    X2 = SubshiftSpec.full(2)
    code = BlockCode.from_function(1, lambda u: u[0] ^ u[2], golden, X2)
    from symentropy import apply_block_code
    from symentropy.language import realized_words
    for n in range(1, 7):
        imgs = {apply_block_code(code, w) for w in realized_words(golden, None, 0, n + 1)}
        assert image_word_counts(code, None, n)[n - 1] == len(imgs)


def test_factor_does_not_increase_entropy(golden):
    X2 = SubshiftSpec.full(2)
    code = BlockCode.from_function(1, lambda u: u[0] ^ u[2], golden, X2)
    h_img = image_cover_entropy(code, None, 12).value
    h_src = estimate_cover_entropy(golden).value
    assert h_img <= h_src + 0.05


def test_local_entropy_examples(full2):
    x = DigitSetSchedule.point(2, (0, 1))
    assert local_entropy(LocalBallSpec(full2, x, 2 ** -3)).value == pytest.approx(0, abs=0.05)
    X1 = SubshiftSpec.full(1)
    assert local_entropy(LocalBallSpec(X1, DigitSetSchedule.full(1), 0.5)).value == 0.0


def test_slope_fit_exact_line():
    slope, rms = slope_fit([1, 2, 3, 4], [0.5, 1.0, 1.5, 2.0])
    assert slope == pytest.approx(0.5) and rms == pytest.approx(0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sets(st.integers(0, 1), min_size=1), min_size=1, max_size=3),
       st.integers(1, 8), st.sampled_from([0.6, 0.3, 0.2]))
def test_counts_monotone_in_subset(period, n, eps):
    X = SubshiftSpec.full(2)
    K = DigitSetSchedule.periodic(2, period)
    assert separated_spanning_counts(X, K, n, eps)[0] <= separated_spanning_counts(X, None, n, eps)[0]
    assert (separated_spanning_counts(X, K, n, eps)[0]
            <= separated_spanning_counts(X, K, n, eps / 2)[0])
