import math

import numpy as np
import pytest

from symentropy import (BaseEntropyTooSmall, DigitSetSchedule, PermutationPhi, SubshiftSpec,
                        build_phi, build_tower, h_star_profile, tower_local_entropy)
from symentropy.tower import TowerPoint, sample_centers

LOG2 = math.log(2)


def test_phi_examples():
    assert build_phi(1).map == (2, 0, 1)
    assert build_phi(2).map == (2, 0, 4, 1, 3)


@pytest.mark.parametrize("n", range(1, 21))
def test_phi_is_one_short_cycle(n):
    phi = build_phi(n)
    size = 2 * n + 1
    for i in range(size):
        assert phi.power(i, size) == i
        assert all(phi.power(i, t) != i for t in range(1, size))
        assert abs(phi(i) - i) <= 2
    assert phi.cycle()[0] == 0 and sorted(phi.cycle()) == list(range(size))


def test_phi_validation():
    with pytest.raises(ValueError):
        PermutationPhi(1, (1, 1, 0))
    with pytest.raises(ValueError):
        PermutationPhi(2, (1, 0, 3, 4, 2))  # two cycles


def test_build_tower_examples():
    t1 = build_tower(1, SubshiftSpec.full(8))
    assert t1.eps_n == pytest.approx(1.0)
    t2 = build_tower(2, SubshiftSpec.full(32))
    assert t2.eps_n == pytest.approx(5 / 9)
    with pytest.raises(BaseEntropyTooSmall):
        build_tower(1, SubshiftSpec.full(2))
    with pytest.raises(BaseEntropyTooSmall):
        build_tower(1, SubshiftSpec.full(1))


def test_pieces_are_disjoint_and_ordered():
    tw = build_tower(2, SubshiftSpec.full(32))
    ivs = [tw.piece_interval(j) for j in range(tw.size)]
    assert all(ivs[j][1] < ivs[j + 1][0] for j in range(tw.size - 1))
    assert ivs[-1][1] <= 1.0


def random_points(tw, rng, count, width=9):
    M = tw.base.alphabet_size
    for _ in range(count):
        word = tuple(int(x) for x in rng.integers(M, size=width))
        yield TowerPoint(int(rng.integers(tw.size)), word, int(rng.integers(2, width - 2)))


@pytest.mark.parametrize("n,M", [(1, 8), (2, 32)])
def test_T_is_a_bijection(n, M):
    tw = build_tower(n, SubshiftSpec.full(M))
    rng = np.random.default_rng(n)
    for p in random_points(tw, rng, 10_000):
        assert tw.T_inv(tw.T(p)) == p
        assert tw.T(tw.T_inv(p)) == p


def test_full_orbit_shifts_base_once():
    tw = build_tower(2, SubshiftSpec.full(32))
    p = TowerPoint(0, (1, 2, 3, 4, 5), 2)
    q = p
    for _ in range(tw.size):
        q = tw.T(q)
    assert q.piece == 0 and q.zero == p.zero + 1


def test_embedding_stays_in_piece():
    tw = build_tower(1, SubshiftSpec.full(8))
    rng = np.random.default_rng(3)
    for p in random_points(tw, rng, 500):
        lo, hi = tw.piece_interval(p.piece)
        assert lo <= tw.embed(p) <= hi


@pytest.mark.parametrize("n,M", [(1, 8), (2, 32)])
def test_local_entropy_at_eps_n(n, M):
    tw = build_tower(n, SubshiftSpec.full(M))
    est = tower_local_entropy(tw)
    assert est.extra["exact_lower"] == pytest.approx(LOG2, abs=1e-12)
    assert est.extra["lower_bound_ok"]
    assert est.value >= LOG2 - 0.1


def test_local_entropy_vanishes_at_small_eps():
    tw = build_tower(1, SubshiftSpec.full(8))
    est = tower_local_entropy(tw, eps=tw.eps_n / 10)
    assert est.value <= 0.1
    assert est.extra["full_pieces"] == []


def test_sample_centers_distinct():
    tw = build_tower(1, SubshiftSpec.full(8))
    cs = sample_centers(tw, 5, np.random.default_rng(0))
    assert len(cs) == len(set(cs)) == 5
    assert cs[0] == (0, DigitSetSchedule.point(8, (0,)))


def test_h_star_profile():
    towers = [build_tower(1, SubshiftSpec.full(8)), build_tower(2, SubshiftSpec.full(32))]
    eps = [1.0, 5 / 9, 0.1, 0.05]
    prof = h_star_profile(towers, eps, centers_per_system=2)
    assert prof.checks["non_asymptotic"] and prof.checks["quasi"]
    assert all(v >= LOG2 - 0.1 for v in prof.checks["value_at_eps_n"].values())
    vals = [row["value"] for row in prof.per_eps]
    assert vals == sorted(vals, reverse=True)


def test_h_star_profile_without_towers_is_zero():
    prof = h_star_profile([], [1.0, 0.1])
    assert [row["value"] for row in prof.per_eps] == [0.0, 0.0]
