"""Cyclic towers over a shift: 2n+1 copies of a base system visited in the order
of a permutation phi_n with |phi_n(i) - i| <= 2.

Piece j sits on the interval J^j = [2j/(4n+1), (2j+1)/(4n+1)] of the line; a
base point is placed inside its piece by a Cantor embedding (interleaved
coordinates c_0, c_1, c_-1, c_2, ... as digits 2c in base 2M-1). The map moves
piece j to piece phi(j) and applies the base shift on the way back into piece 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cover import EntropyEstimate, RESIDUAL_LIMIT, slope_fit
from .errors import BaseEntropyTooSmall
from .language import Language
from .symbolic import DigitSetSchedule, MetricParams, SubshiftSpec, spectral_entropy


@dataclass(frozen=True)
class PermutationPhi:
    n: int
    map: tuple

    def __post_init__(self):
        size = 2 * self.n + 1
        if sorted(self.map) != list(range(size)):
            raise ValueError("map is not a permutation of 0..2n")
        if any(abs(self.map[i] - i) > 2 for i in range(size)):
            raise ValueError("|phi(i) - i| must be <= 2")
        for i in range(size):
            j, steps = self.map[i], 1
            while j != i:
                j, steps = self.map[j], steps + 1
            if steps != size:
                raise ValueError("phi must be a single (2n+1)-cycle")

    def __call__(self, i: int) -> int:
        return self.map[i]

    @property
    def inverse(self) -> tuple:
        inv = [0] * len(self.map)
        for i, j in enumerate(self.map):
            inv[j] = i
        return tuple(inv)

    def power(self, i: int, t: int) -> int:
        for _ in range(t % len(self.map)):
            i = self.map[i]
        return i

    def cycle(self) -> list[int]:
        """Pieces in visiting order starting from 0."""
        out, j = [0], self.map[0]
        while j != 0:
            out.append(j)
            j = self.map[j]
        return out


def build_phi(n: int) -> PermutationPhi:
    """0 -> 2 -> 4 -> ... -> 2n -> 2n-1 -> 2n-3 -> ... -> 1 -> 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    phi = [0] * (2 * n + 1)
    for i in range(0, 2 * n - 1, 2):
        phi[i] = i + 2
    phi[2 * n] = 2 * n - 1
    for i in range(3, 2 * n, 2):
        phi[i] = i - 2
    phi[1] = 0
    return PermutationPhi(n, tuple(phi))


@dataclass(frozen=True)
class TowerPoint:
    """Piece index and a finite view of the base point: ``word[zero]`` is coordinate 0."""
    piece: int
    word: tuple
    zero: int = 0

    def coord(self, i: int) -> int:
        return self.word[self.zero + i]

    def known(self) -> range:
        return range(-self.zero, len(self.word) - self.zero)


@dataclass
class TowerSystem:
    n: int
    base: SubshiftSpec
    phi: PermutationPhi = None
    metric: MetricParams = field(default_factory=MetricParams)

    def __post_init__(self):
        if self.phi is None:
            self.phi = build_phi(self.n)
        self.h_base = spectral_entropy(self.base) if self.base.n_states else 0.0
        need = (2 * self.n + 1) * math.log(2)
        if self.h_base < need - 1e-12:
            raise BaseEntropyTooSmall(
                f"base entropy {self.h_base:.6g} < (2n+1) log 2 = {need:.6g}")
        self.order = self.phi.cycle()
        self.pos = {j: i for i, j in enumerate(self.order)}
        self.lang = Language(self.base)

    # -- geometry -----------------------------------------------------------------
    @property
    def size(self) -> int:
        return 2 * self.n + 1

    @property
    def eps_n(self) -> float:
        return 5 / (4 * self.n + 1)

    @property
    def L(self) -> float:
        return 1 / (4 * self.n + 1)

    def piece_interval(self, j: int) -> tuple[float, float]:
        return 2 * j * self.L, (2 * j + 1) * self.L

    @property
    def B(self) -> int:
        return 2 * self.base.alphabet_size - 1

    def embed(self, p: TowerPoint) -> float:
        """Height of a point in the line (truncated to the known coordinates)."""
        val = 0.0
        known = p.known()
        for i in range(2 * len(p.word) + 1):
            c = (i + 1) // 2 if i % 2 else -(i // 2)
            if c not in known:
                break
            val += 2 * p.coord(c) * self.B ** -(i + 1)
        return self.piece_interval(p.piece)[0] + self.L * val

    # -- dynamics -----------------------------------------------------------------
    def T(self, p: TowerPoint) -> TowerPoint:
        if p.piece != self.phi.inverse[0]:
            return TowerPoint(self.phi(p.piece), p.word, p.zero)
        return TowerPoint(0, p.word, p.zero + 1)

    def T_inv(self, p: TowerPoint) -> TowerPoint:
        if p.piece != 0:
            return TowerPoint(self.phi.inverse[p.piece], p.word, p.zero)
        return TowerPoint(self.phi.inverse[0], p.word, p.zero - 1)

    def wraps(self, j: int, t: int) -> int:
        """Number of base-shift steps a point of piece j takes in t iterates."""
        return (self.pos[j] + t) // self.size

    # -- separation scales -----------------------------------------------------------
    def digit_window(self, r: int) -> tuple[int, int]:
        """Coordinates carried by the first r interleaved digits."""
        if r <= 0:
            return 0, -1
        return -((r - 1) // 2), r // 2

    def digits_for(self, eps: float) -> tuple[int, int]:
        """(r0, r1): differing within r0 digits forces distance > eps; agreeing on r1 forces <= eps."""
        r1 = max(0, math.ceil(math.log(self.L / eps, self.B) - 1e-12))
        r0 = max(0, r1 - 1)
        return r0, r1

    def full_pieces(self, j_x: int, eps: float) -> list[int]:
        """Pieces lying entirely in Phi_eps of any point of piece j_x."""
        out = []
        for j in range(self.size):
            worst = max(abs(self.phi.power(j, t) - self.phi.power(j_x, t))
                        for t in range(self.size))
            if (2 * worst + 1) * self.L <= eps + 1e-15:
                out.append(j)
        return out

    def fiber_count(self, j: int, fiber, a: int, b: int, t: int) -> int:
        """Base words realized on the union of windows [a, b] + q, q <= wraps(j, t)."""
        hi = b + self.wraps(j, t)
        if hi < a:
            return 1
        lang = self.lang if fiber is None else Language(self.base, fiber)
        return lang.count_window(a, hi)

    def separated_counts(self, center: tuple, eps: float, fine: float, n_values) -> dict:
        """s_n for Phi_eps(center) at scale ``fine`` < L, lower and upper digit windows."""
        j_x, c_x = center
        full = self.full_pieces(j_x, eps)
        fiber = None
        if j_x not in full:
            r_eps = self.digits_for(eps)[1]
            a_fix = self.digit_window(r_eps)[0] if r_eps > 0 else 0
            fiber = _pin_from(c_x, a_fix)
        out = {}
        for tag, r in zip(("lower", "upper"), self.digits_for(fine)):
            a, b = self.digit_window(r)
            rows = []
            for nn in n_values:
                tot = sum(self.fiber_count(j, None, a, b, nn - 1) for j in full)
                if fiber is not None:
                    tot += self.fiber_count(j_x, fiber, a, b, nn - 1)
                rows.append(tot)
            out[tag] = rows
        out["full_pieces"] = full
        return out

    def local_entropy(self, center, eps: float, n_periods: int = 8) -> EntropyEstimate:
        """h(T, Phi_eps(x)) by separated counts at a scale below the piece gap."""
        if isinstance(center, tuple):
            j_x, c_x = center
        else:
            j_x, c_x = 0, center
        c_x = c_x if c_x is not None else DigitSetSchedule.point(self.base.alphabet_size, (0,))
        fine = min(eps, self.L) / (self.B ** 2)
        step = self.size
        ns = [step * i + 1 for i in range(1, n_periods + 1)]
        cnt = self.separated_counts((j_x, c_x), eps, fine, ns)
        half = ns[len(ns) // 2 - 1:]
        fits = {}
        for tag in ("lower", "upper"):
            logs = [math.log(v) for v in cnt[tag]]
            fits[tag] = slope_fit(half, logs[len(ns) // 2 - 1:])
        value, res = fits["upper"]
        lo = min(f[0] for f in fits.values())
        hi = max(f[0] for f in fits.values())
        # a whole piece inside Phi carries h(base)/(2n+1)
        exact_lower = self.h_base / self.size if cnt["full_pieces"] else 0.0
        return EntropyEstimate(max(value, 0.0), "slope-fit", (half[0], half[-1]), res,
                               (max(lo, 0.0), max(hi, 0.0)), res <= RESIDUAL_LIMIT,
                               extra={"exact_lower": exact_lower,
                                      "full_pieces": cnt["full_pieces"],
                                      "fine_scale": fine, "eps": eps})


def _pin_from(c_x: DigitSetSchedule, a: int) -> DigitSetSchedule:
    """Base points agreeing with c_x on every coordinate >= a (a <= 0)."""
    return DigitSetSchedule(c_x.alphabet_size, preperiod=c_x.preperiod, period=c_x.period,
                            left_prefix=tuple(c_x.allowed(-j) for j in range(1, -a + 1)))


def build_tower(n: int, base: SubshiftSpec) -> TowerSystem:
    return TowerSystem(n, base)


def tower_local_entropy(tower: TowerSystem, center=None, eps: float | None = None,
                        tol: float = 0.05) -> EntropyEstimate:
    """Local entropy at eps (default eps_n) with the exact bound h(base)/(2n+1).

    The bound holds because piece 0 lies inside Phi_{eps_n}(x) for x in piece 0.
    """
    eps = tower.eps_n if eps is None else eps
    est = tower.local_entropy(center if center is not None else (0, None), eps)
    est.extra["lower_bound_ok"] = est.value >= est.extra["exact_lower"] - tol
    return est


@dataclass
class HStarProfile:
    eps_values: list
    per_eps: list
    per_center: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)


def sample_centers(tower: TowerSystem, count: int, rng, max_tries: int = 1000) -> list:
    """Distinct (piece, periodic base point) pairs; the first is 0^inf in piece 0."""
    M = tower.base.alphabet_size
    out = [(0, DigitSetSchedule.point(M, (0,)))]
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        j = int(rng.integers(tower.size))
        per = tuple(int(x) for x in rng.integers(M, size=int(rng.integers(1, 4))))
        c = (j, DigitSetSchedule.point(M, per))
        if c not in out and not Language(tower.base, c[1]).is_empty:
            out.append(c)
    return out


def h_star_profile(towers, eps_list, centers_per_system: int = 3, seed: int = 0,
                   tol: float = 0.1) -> HStarProfile:
    """sup over sampled centers of h(T, Phi_eps(x)) per eps, with the two signatures.

    non-asymptotic: value at eps_n is >= log 2 - tol for every tower n;
    quasi: for each fixed center the value at the smallest eps is <= tol.
    """
    eps_list = sorted(set(float(e) for e in eps_list), reverse=True)
    rng = np.random.default_rng(seed)
    centers = {}
    for tw in towers:
        for i, c in enumerate(sample_centers(tw, centers_per_system, rng)):
            centers[f"n{tw.n}/c{i}/piece{c[0]}"] = (tw, c)
    per_center = {cid: [] for cid in centers}
    per_eps = []
    for eps in eps_list:
        best, arg = 0.0, None
        for cid, (tw, c) in sorted(centers.items()):
            v = tw.local_entropy(c, eps).value
            per_center[cid].append(v)
            if v > best + 1e-12:
                best, arg = v, cid
        per_eps.append({"eps": eps, "value": best, "argmax": arg})
    at_eps_n = {}
    for tw in towers:
        at_eps_n[tw.n] = tw.local_entropy((0, None), tw.eps_n).value
    checks = {
        "non_asymptotic": all(v >= math.log(2) - tol for v in at_eps_n.values()),
        "value_at_eps_n": at_eps_n,
        "quasi": all(vals[-1] <= tol for vals in per_center.values()),
    }
    return HStarProfile(eps_list, per_eps, per_center, checks)
