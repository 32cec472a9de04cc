import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from symentropy import (BlockCode, DigitSetSchedule, InadmissibleWord, MetricParams,
                        SubshiftSpec, WordTooShort, apply_block_code, count_words,
                        spectral_entropy)
from symentropy.symbolic import strong_components


def brute_count(shift, n):
    return sum(shift.is_admissible(w) for w in itertools.product(range(shift.alphabet_size), repeat=n))


def test_count_words_examples(full2, golden, half_free):
    assert count_words(full2, None, 3) == 8
    assert count_words(golden, None, 4) == 8
    assert count_words(full2, half_free, 4) == 4


def test_golden_mean_counts_follow_fibonacci(golden):
    counts = [count_words(golden, None, n) for n in range(1, 15)]
    assert counts[:2] == [2, 3]
    assert all(counts[i] == counts[i - 1] + counts[i - 2] for i in range(2, len(counts)))


@pytest.mark.parametrize("forbidden", [["11"], ["00", "111"], ["010"], ["12", "21"]])
def test_count_words_matches_enumeration(forbidden):
    m = 3 if any("2" in f for f in forbidden) else 2
    X = SubshiftSpec(m, forbidden=forbidden)
    for n in range(1, 8):
        assert count_words(X, None, n) == brute_count(X, n)


def test_spectral_entropy_examples(full2, golden):
    assert spectral_entropy(full2) == pytest.approx(math.log(2), abs=1e-12)
    assert spectral_entropy(golden) == pytest.approx(math.log((1 + 5 ** 0.5) / 2), abs=1e-12)
    assert spectral_entropy(SubshiftSpec.from_matrix([[1]])) == 0.0


def test_spectral_entropy_reducible_takes_max_component():
    # symbol 0 -> 0,1 ; 1 -> 1,2 ; 2 -> 2 only (three one-state components)
    X = SubshiftSpec.from_matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert len(strong_components(X.adjacency)) == 3
    with pytest.warns(Warning):
        assert spectral_entropy(X) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_slope_converges_to_spectral_entropy(m):
    X = SubshiftSpec(m, forbidden=["00"])
    n = 24
    slope = math.log(count_words(X, None, n + 1)) - math.log(count_words(X, None, n))
    assert slope == pytest.approx(spectral_entropy(X), abs=1e-3)


def test_block_code_examples():
    X4, X2 = SubshiftSpec.full(4), SubshiftSpec.full(2)
    assert apply_block_code(BlockCode.identity(X2), "0101") == (0, 1, 0, 1)
    pairing = BlockCode.from_function(0, lambda w: w[0] % 2, X4, X2)
    assert apply_block_code(pairing, "0123") == (0, 1, 0, 1)
    xor = BlockCode.from_function(1, lambda w: w[0] ^ w[2], X2, X2)
    assert apply_block_code(xor, "010") == (0,)


def test_block_code_errors(golden):
    xor = BlockCode.from_function(1, lambda w: w[0] ^ w[2], golden, SubshiftSpec.full(2))
    with pytest.raises(WordTooShort):
        apply_block_code(xor, "01")
    with pytest.raises(InadmissibleWord):
        apply_block_code(xor, "0110")


def test_metric_window_radius():
    d = MetricParams()
    assert d.window_radius(1.0) == -1
    assert d.window_radius(0.5) == 0
    assert d.window_radius(0.6) == 0
    assert d.window_radius(0.3) == 1
    assert d.window_radius(0.25) == 1
    assert d.window_radius(0.2) == 2


def test_schedule_shift_and_allowed():
    K = DigitSetSchedule.periodic(3, [{0}, {1, 2}], preperiod=[{2}])
    assert K.allowed(0) == {2}
    assert K.allowed(1) == {0} and K.allowed(2) == {1, 2} and K.allowed(3) == {0}
    assert K.shift(1).allowed(0) == {0}
    assert K.shift(2).allowed(5) == K.allowed(7)


def test_schedule_json_roundtrip():
    from symentropy.config import schedule_from_json
    K = DigitSetSchedule.periodic(3, [{0}, {1, 2}], preperiod=[{2}])
    assert schedule_from_json(K.to_json()) == K


words = st.lists(st.sampled_from(["0", "1", "2"]), min_size=2, max_size=3).map("".join)


@settings(max_examples=40, deadline=None)
@given(st.lists(words, min_size=0, max_size=3), st.integers(1, 9))
def test_growth_is_submultiplicative(forbidden, n):
    X = SubshiftSpec(3, forbidden=forbidden)
    assert count_words(X, None, n + 1) <= 3 * count_words(X, None, n)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sets(st.integers(0, 2), min_size=1), min_size=1, max_size=4),
       st.integers(0, 3), st.integers(0, 2), st.integers(1, 7))
def test_enlarging_allowed_sets_never_decreases_counts(period, pos, extra, n):
    pos %= len(period)
    K = DigitSetSchedule.periodic(3, period)
    bigger = list(period)
    bigger[pos] = set(bigger[pos]) | {extra}
    K2 = DigitSetSchedule.periodic(3, bigger)
    X = SubshiftSpec(3, forbidden=["01"])
    assert count_words(X, K, n) <= count_words(X, K2, n)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=3, max_size=12))
def test_block_code_image_is_admissible(w):
    # marking isolated 1s never produces "11"
    X2, gm = SubshiftSpec.full(2), SubshiftSpec.golden_mean()
    code = BlockCode.from_function(1, lambda u: int(u == (0, 1, 0)), X2, gm)
    assert gm.is_admissible(apply_block_code(code, w))


def test_full_shift_counts_are_powers():
    for m in (2, 3, 5):
        X = SubshiftSpec.full(m)
        assert [count_words(X, None, n) for n in range(1, 6)] == [m ** n for n in range(1, 6)]
