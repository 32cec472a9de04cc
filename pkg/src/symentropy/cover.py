"""Covering entropy of schedule sets: subcover counts, Bowen spanning/separated
counts, conditional and relative entropy, and local entropy of forward fibers.

All entropies are in nats. Limits are replaced by least-squares slopes over the
upper half of the computed range; the fit residual is reported, never hidden.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DepthOverflow, IncompatibleAlphabet
from .language import ENUM_LIMIT, Language
from .symbolic import (
    BlockCode,
    DigitSetSchedule,
    MetricParams,
    SubshiftSpec,
    as_word,
    subset_parts,
)

RESIDUAL_LIMIT = 0.05
EXACT_WINDOW = 512


@dataclass(frozen=True)
class CoverSpec:
    """A cover of the shift by cylinder unions on the window ``[-offset, depth-1-offset]``.

    ``kind="partition"`` uses every admissible word of that window as a cell;
    ``depth=0`` is the trivial cover ``{X}``. ``kind="general"`` lists the cover
    elements as sets of words on the window.
    """
    kind: str = "partition"
    depth: int = 1
    offset: int = 0
    elements: tuple = ()

    def __post_init__(self):
        if self.kind not in ("partition", "general"):
            raise ValueError("kind must be 'partition' or 'general'")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.kind == "general":
            els = tuple(frozenset(as_word(w) for w in e) for e in self.elements)
            if not els or any(len(w) != self.depth for e in els for w in e):
                raise ValueError("general cover elements must be non-empty sets of depth-length words")
            object.__setattr__(self, "elements", els)

    @classmethod
    def blocks(cls, depth: int, offset: int = 0) -> "CoverSpec":
        return cls("partition", depth, offset)

    @classmethod
    def trivial(cls) -> "CoverSpec":
        return cls("partition", 0, 0)

    def join_window(self, n: int, power: int = 1) -> tuple[int, int]:
        """Coordinates fixed by a cell of ``U_0^{n-1}`` under ``T^power``."""
        if self.depth == 0:
            return 0, -1
        return -self.offset, power * (n - 1) + self.depth - 1 - self.offset

    def check_covers(self, shift: SubshiftSpec) -> bool:
        if self.kind == "partition":
            return True
        words = Language(shift).words(-self.offset, self.depth - 1 - self.offset)
        union = set().union(*self.elements)
        return all(w in union for w in words)


@dataclass
class EntropyEstimate:
    value: float
    method: str
    n_range: tuple
    residual: float = 0.0
    bounds: tuple | None = None
    converged: bool = True
    exact: bool = False
    rows: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < -1e-12:
            raise ValueError(f"entropy estimate must be finite and >= 0, got {self.value}")
        self.value = max(self.value, 0.0)
        if self.bounds is not None:
            lo, hi = self.bounds
            self.bounds = (min(lo, self.value), max(hi, self.value))


@dataclass(frozen=True)
class LocalBallSpec:
    """Center and radius of the forward fiber Phi_eps(x)."""
    system: object
    center: object
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


class CoverCount(int):
    """A subcover cardinality; ``exact`` is False for greedy set-cover values."""

    def __new__(cls, value, exact=True, ratio_bound=1.0):
        obj = super().__new__(cls, value)
        obj.exact = exact
        obj.ratio_bound = ratio_bound
        return obj


def slope_fit(ns, logs) -> tuple[float, float]:
    """Least-squares slope and RMS residual of ``logs`` against ``ns``."""
    ns = np.asarray(ns, dtype=float)
    ys = np.asarray(logs, dtype=float)
    if len(ns) < 2:
        return (float(ys[0] / ns[0]) if len(ns) and ns[0] else 0.0), 0.0
    slope, icpt = np.polyfit(ns, ys, 1)
    res = ys - (slope * ns + icpt)
    return float(slope), float(np.sqrt(np.mean(res ** 2)))


def _log(x) -> float:
    if isinstance(x, float):
        return x
    return math.log(x) if x > 0 else -math.inf


def fit_grid(n_max: int, step: int = 1) -> list[int]:
    """Upper-half grid ``n_max/2 .. n_max`` stepping by the schedule period.

    At least three points; ``n_max`` is extended when the period is long.
    """
    lo = max(1, n_max // 2)
    hi = max(n_max, lo + 2 * step)
    return list(range(lo, hi + 1, step))


def _period_step(parts) -> int:
    return math.lcm(*(p.q for p in parts)) if parts else 1


# -- subcover counts ----------------------------------------------------------

def min_subcover_count(shift: SubshiftSpec, cover: CoverSpec, K, n: int,
                       power: int = 1) -> CoverCount:
    """N(U_0^{n-1}, K): minimal number of cells of the n-th join covering K."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lang = Language(shift, K)
    if lang.is_empty or cover.depth == 0:
        return CoverCount(1)
    a, b = cover.join_window(n, power)
    if cover.kind == "partition":
        if b - a + 1 > EXACT_WINDOW * 8:
            raise DepthOverflow(f"join window of length {b - a + 1} is beyond the counting limit")
        return CoverCount(lang.count_window(a, b))
    return _greedy_join_cover(lang.words(a, b), cover, n, power)


def _cells_of(word, cover: CoverSpec, n: int, power: int):
    """All join cells (tuples of element indices) containing a hull word."""
    per = []
    for i in range(n):
        w = word[power * i: power * i + cover.depth]
        per.append([j for j, e in enumerate(cover.elements) if w in e])
    return itertools.product(*per)


def _greedy_join_cover(words, cover: CoverSpec, n: int, power: int) -> CoverCount:
    if not words:
        return CoverCount(1)
    cells = {}
    for wi, w in enumerate(words):
        for cell in _cells_of(w, cover, n, power):
            cells.setdefault(cell, set()).add(wi)
            if len(cells) > ENUM_LIMIT:
                raise DepthOverflow("too many join cells for greedy set cover")
    return _greedy(cells, len(words))


def _greedy(cells: dict, universe: int) -> CoverCount:
    left = set(range(universe))
    chosen = 0
    biggest = max(len(v) for v in cells.values())
    while left:
        best = max(cells, key=lambda c: (len(cells[c] & left), c))
        gain = cells[best] & left
        left -= gain
        chosen += 1
    harmonic = sum(1.0 / i for i in range(1, biggest + 1))
    return CoverCount(chosen, exact=False, ratio_bound=harmonic)


# -- Bowen spanning / separated counts -----------------------------------------

def bowen_window(n: int, eps: float, metric: MetricParams = MetricParams(), power: int = 1):
    """Coordinates on which two points must agree to be within eps in d_n.

    ``None`` when every pair is within eps.
    """
    k = metric.window_radius(eps)
    if k < 0:
        return None
    return -k, power * (n - 1) + k


def separated_spanning_counts(shift: SubshiftSpec, K, n: int, eps: float,
                              metric: MetricParams = MetricParams(),
                              power: int = 1) -> tuple[int, int]:
    """(s_n, r_n): largest (n,eps)-separated subset of K, smallest spanning set.

    For the ultrametric ``d`` the relation ``d_n <= eps`` is an equivalence whose
    classes are the realized words on the Bowen window, so both counts equal the
    number of such words.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < eps:
        raise ValueError("eps must be positive")
    lang = Language(shift, K)
    if lang.is_empty:
        return 1, 1
    win = bowen_window(n, eps, metric, power)
    if win is None:
        return 1, 1
    c = lang.count_window(*win)
    return c, c


def brute_force_separated(shift: SubshiftSpec, K, n: int, eps: float,
                          metric: MetricParams = MetricParams(), power: int = 1,
                          pad: int = 2) -> int:
    """Greedy maximal separated set over explicit points (an independent oracle).

    Points are represented by realized words on a window padded by ``pad`` past
    the Bowen window; d_n is evaluated literally from the metric.
    """
    lang = Language(shift, K)
    if lang.is_empty:
        return 1
    k = max(metric.window_radius(eps), 0)
    a, b = -k - pad, power * (n - 1) + k + pad
    pts = lang.words(a, b)

    def dn(x, y):
        best = 0.0
        for i in range(n):
            c = power * i
            for r in range(k + pad + 1):
                if x[c + r - a] != y[c + r - a] or x[c - r - a] != y[c - r - a]:
                    best = max(best, metric.base ** -r)
                    break
        return best

    chosen = []
    for p in pts:
        if all(dn(p, c) > eps for c in chosen):
            chosen.append(p)
    return len(chosen)


# -- covering entropy estimate --------------------------------------------------

def estimate_cover_entropy(shift: SubshiftSpec, K=None, n_max: int = 24,
                           eps_list=(0.5, 0.25, 0.125),
                           metric: MetricParams = MetricParams(),
                           power: int = 1) -> EntropyEstimate:
    """h(T^power, K) from the growth of separated counts, with the cover sandwich.

    For each eps the slope of ``log s_n`` is fitted over the upper half of the
    range (stepping by the schedule period); the value reported is the slope at
    the smallest eps. Each row also carries ``N_lower`` (1-block join count) and
    ``N_upper`` (count for cylinders strictly finer than eps), and the chain
    ``N_lower <= r_n <= s_n <= N_upper`` is checked row by row.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    parts = subset_parts(K, shift.alphabet_size)
    lang = Language(shift, K)
    eps_list = sorted({float(e) for e in eps_list}, reverse=True)
    if lang.is_empty:
        return EntropyEstimate(0.0, "slope-fit", (1, n_max), 0.0, (0.0, 0.0), True, True,
                               extra={"empty": True})
    step = _period_step(parts)
    grid = fit_grid(n_max, step)
    top = grid[-1]
    ns = list(range(1, top + 1)) if top <= 64 else sorted(set(grid) | {1})
    longest = power * (top - 1) + 2 * (max(metric.window_radius(min(eps_list)), 0) + 1) + 1
    exact = longest <= EXACT_WINDOW

    def counts_for(a, offset_hi):
        ends = [power * (n - 1) + offset_hi for n in ns]
        got = lang.counts_along(a, ends, exact=exact)
        return [got[e] for e in ends]

    lower = counts_for(0, 0)
    rows = []
    slopes = {}
    residuals = {}
    sandwich_ok = True
    for eps in eps_list:
        k = metric.window_radius(eps)
        if k < 0:
            s_counts = [1] * len(ns)
            upper = counts_for(0, 0)
        else:
            s_counts = counts_for(-k, k)
            upper = counts_for(-k - 1, k + 1)
        logs = [_log(c) for c in s_counts]
        idx = [ns.index(n) for n in grid]
        slope, res = slope_fit(grid, [logs[i] for i in idx])
        slopes[eps] = slope
        residuals[eps] = res
        prev = None
        for j, n in enumerate(ns):
            lo_c, s_c, up_c = lower[j], s_counts[j], upper[j]
            if exact:
                sandwich_ok &= lo_c <= s_c <= up_c
            else:
                sandwich_ok &= _log(lo_c) <= _log(s_c) + 1e-9 and _log(s_c) <= _log(up_c) + 1e-9
            local = None if prev is None else (logs[j] - prev[1]) / (n - prev[0])
            prev = (n, logs[j])
            rows.append({"n": n, "eps": eps, "s_n": s_c, "r_n": s_c,
                         "N_lower": lo_c, "N_upper": up_c, "slope": local})
    lower_slope, _ = slope_fit(grid, [_log(lower[ns.index(n)]) for n in grid])
    finest = min(eps_list)
    value = slopes[finest]
    all_slopes = list(slopes.values()) + [lower_slope]
    est = EntropyEstimate(
        value=max(value, 0.0), method="slope-fit", n_range=(grid[0], grid[-1]),
        residual=residuals[finest], bounds=(max(min(all_slopes), 0.0), max(all_slopes)),
        converged=residuals[finest] <= RESIDUAL_LIMIT, exact=False, rows=rows,
        extra={"slopes": slopes, "residuals": residuals, "sandwich_ok": bool(sandwich_ok),
               "lower_slope": lower_slope, "step": step, "power": power},
    )
    return est


# -- conditional entropy --------------------------------------------------------

def _hull(covers, n):
    wins = [c.join_window(n) for c in covers if c.depth > 0]
    if not wins:
        return 0, -1
    return min(a for a, _ in wins), max(b for _, b in wins)


def conditional_count(shift: SubshiftSpec, U1: CoverSpec, U2: CoverSpec, n: int, K=None) -> int:
    """N((U1)_0^{n-1} | (U2)_0^{n-1}) restricted to K: the worst U2-cell's subcover size."""
    lang = Language(shift, K)
    if lang.is_empty:
        return 1
    a, b = _hull((U1, U2), n)
    if b < a:
        return 1
    words = lang.words(a, b)

    def cell_keys(cover, w):
        if cover.depth == 0:
            return [()]
        lo, hi = cover.join_window(n)
        sub = w[lo - a: hi - a + 1]
        if cover.kind == "partition":
            return [sub]
        return list(_cells_of(sub, cover, n, 1))

    groups = {}
    for w in words:
        for key in cell_keys(U2, w):
            groups.setdefault(key, []).append(w)
    worst = 1
    for members in groups.values():
        if U1.depth == 0:
            cnt = 1
        elif U1.kind == "partition":
            lo, hi = U1.join_window(n)
            cnt = len({w[lo - a: hi - a + 1] for w in members})
        else:
            lo, hi = U1.join_window(n)
            cells = {}
            for wi, w in enumerate(members):
                for cell in _cells_of(w[lo - a: hi - a + 1], U1, n, 1):
                    cells.setdefault(cell, set()).add(wi)
            cnt = int(_greedy(cells, len(members)))
        worst = max(worst, cnt)
    return worst


def conditional_cover_entropy(shift: SubshiftSpec, U1: CoverSpec, U2: CoverSpec,
                              n_max: int = 10, K=None) -> EntropyEstimate:
    """h(T, U1 | U2) = lim (1/n) log N(U1^n | U2^n).

    The sequence is subadditive, so ``min_n (1/n) log N`` is a certified upper
    bound at every computed n; the value is the upper-half slope clipped to it.
    """
    ns = list(range(1, n_max + 1))
    logs = [math.log(conditional_count(shift, U1, U2, n, K)) for n in ns]
    upper = min(l / n for n, l in zip(ns, logs))
    grid = fit_grid(n_max)
    slope, res = slope_fit(grid, [logs[n - 1] for n in grid])
    value = min(max(slope, 0.0), upper)
    return EntropyEstimate(value, "slope-fit", (grid[0], grid[-1]), res, (0.0, upper),
                           res <= RESIDUAL_LIMIT,
                           rows=[{"n": n, "log_N": l} for n, l in zip(ns, logs)])


def conditional_entropy_star(shift: SubshiftSpec, n_max: int = 8, depths=range(1, 7)) -> EntropyEstimate:
    """Upper envelope for h*(T, X) = inf_{U2} sup_{U1} h(T, U1 | U2) over block partitions."""
    depths = list(depths)
    per_u2 = {}
    for d2 in depths:
        per_u2[d2] = max(conditional_cover_entropy(shift, CoverSpec.blocks(d1), CoverSpec.blocks(d2),
                                                   n_max).bounds[1]
                         for d1 in depths)
    best = min(per_u2.values())
    return EntropyEstimate(best, "sandwich", (1, n_max), 0.0, (0.0, best), True,
                           extra={"per_U2_depth": per_u2})


# -- factor maps ----------------------------------------------------------------

def _periodic_points(shift: SubshiftSpec, max_period: int):
    """Primitive periodic words (rotation-minimal) whose repetition is admissible."""
    out = []
    for p in range(1, max_period + 1):
        for w in itertools.product(range(shift.alphabet_size), repeat=p):
            if min(w[i:] + w[:i] for i in range(p)) != w:
                continue
            if any(w == w[:d] * (p // d) for d in range(1, p) if p % d == 0):
                continue
            K = DigitSetSchedule.point(shift.alphabet_size, w)
            if not Language(shift, K).is_empty:
                out.append(w)
    return out


def fiber_counts(code: BlockCode, y_period, n_max: int) -> list[int]:
    """#source words on ``[-r, n-1+r]`` whose image is the n-window of ``y = (y_period)^inf``."""
    r = code.window_radius
    width = 2 * r + 1
    src = code.source
    lang = Language(src)
    L = max(width, src.state_length)
    blocks = lang.words(-r, -r + L - 1)
    index = {w: i for i, w in enumerate(blocks)}
    succ = [[] for _ in blocks]
    for i, u in enumerate(blocks):
        for x in range(src.alphabet_size):
            v = u[1:] + (x,)
            j = index.get(v)
            if j is not None and src.is_admissible(u + (x,)):
                succ[i].append(j)
    image = [code.local_rule[w[:width]] for w in blocks]
    y = as_word(y_period)
    vec = [1 if image[i] == y[0] else 0 for i in range(len(blocks))]
    out = [sum(vec)]
    for n in range(1, n_max):
        want = y[n % len(y)]
        new = [0] * len(blocks)
        for i, c in enumerate(vec):
            if c:
                for j in succ[i]:
                    if image[j] == want:
                        new[j] += c
        vec = new
        out.append(sum(vec))
    return out


def relative_entropy_over_factor(code: BlockCode, n_max: int = 14, fiber_samples: int = 8,
                                 max_period: int = 6, seed: int = 0) -> EntropyEstimate:
    """h_top(T, X | pi) as a sup over eventually periodic fibers of fiber-word growth."""
    ys = _periodic_points(code.target, max_period)
    if len(ys) > fiber_samples:
        rng = np.random.default_rng(seed)
        pick = sorted(rng.choice(len(ys), size=fiber_samples, replace=False))
        ys = [ys[i] for i in pick]
    grid = fit_grid(n_max)
    best = None
    per_y = {}
    for y in ys:
        cnt = fiber_counts(code, y, n_max)
        if cnt[-1] == 0:
            continue
        slope, res = slope_fit(grid, [math.log(cnt[n - 1]) for n in grid])
        per_y[y] = slope
        if best is None or slope > best[0]:
            best = (slope, res, y)
    if best is None:
        return EntropyEstimate(0.0, "slope-fit", (grid[0], grid[-1]), extra={"samples": 0})
    return EntropyEstimate(max(best[0], 0.0), "slope-fit", (grid[0], grid[-1]), best[1],
                           None, best[1] <= RESIDUAL_LIMIT,
                           extra={"samples": len(per_y), "argmax": best[2], "per_fiber": per_y})


def image_word_counts(code: BlockCode, E=None, n_max: int = 12) -> list[int]:
    """#distinct image words on ``[0, n-1]`` of points of E, for n = 1..n_max.

    Subset construction over source configurations (last 2r symbols, state,
    mask): each image word leads to exactly one configuration set, so summing
    multiplicities of the sets counts image words without listing them.
    """
    r = code.window_radius
    width = 2 * r + 1
    lang = Language(code.source, E)
    if lang.is_empty:
        return [1] * n_max
    n0 = max(1, code.source.state_length - 2 * r)

    def image(w):
        return tuple(code.local_rule[w[i:i + width]] for i in range(len(w) - width + 1))

    start = lang.walk(-r, n0 - 1 + r)
    out = [len({image(w)[:n] for w, _, _ in start}) for n in range(1, min(n0, n_max) + 1)]
    groups = {}
    for w, t, mk in start:
        groups.setdefault(image(w), set()).add((w[len(w) - 2 * r:], t, mk))
    states = {}
    for cfgs in groups.values():
        key = frozenset(cfgs)
        states[key] = states.get(key, 0) + 1
    pos = n0 + r
    for _ in range(n0, n_max):
        new = {}
        for cfgs, mult in states.items():
            by_sym = {}
            for tail, t, mk in cfgs:
                for t2, nm in lang.children(pos, t, mk):
                    win = tail + (code.source.states[t2][-1],)
                    by_sym.setdefault(code.local_rule[win], set()).add((win[1:], t2, nm))
            for nxt in by_sym.values():
                key = frozenset(nxt)
                new[key] = new.get(key, 0) + mult
        states = new
        pos += 1
        out.append(sum(states.values()))
    return out


def image_cover_entropy(code: BlockCode, E=None, n_max: int = 12) -> EntropyEstimate:
    """h(S, pi(E)) from the growth of distinct image words."""
    counts = image_word_counts(code, E, n_max)
    grid = fit_grid(n_max)
    slope, res = slope_fit(grid, [math.log(counts[n - 1]) for n in grid])
    return EntropyEstimate(max(slope, 0.0), "slope-fit", (grid[0], grid[-1]), res,
                           converged=res <= RESIDUAL_LIMIT, rows=counts)


# -- local entropy ----------------------------------------------------------------

def forward_fiber(shift: SubshiftSpec, center: DigitSetSchedule, eps: float,
                  metric: MetricParams = MetricParams()):
    """Phi_eps(x) as a schedule: agree with x on every coordinate >= -k(eps)."""
    if not center.is_point:
        raise ValueError("center must be a single point schedule")
    m = shift.alphabet_size
    k = metric.window_radius(eps)
    if k < 0:
        return None
    left = tuple(center.allowed(-j) for j in range(1, k + 1))
    return DigitSetSchedule(m, preperiod=center.preperiod, period=center.period,
                            two_sided_rule="free", left_prefix=left)


def local_entropy(ball: LocalBallSpec, n_max: int = 16, eps_list=None,
                  metric: MetricParams = MetricParams()) -> EntropyEstimate:
    """h(T, Phi_eps(x)). Systems exposing ``local_entropy`` (towers) handle themselves."""
    if hasattr(ball.system, "local_entropy"):
        return ball.system.local_entropy(ball.center, ball.epsilon)
    shift = ball.system
    if ball.center.alphabet_size != shift.alphabet_size:
        raise IncompatibleAlphabet("center alphabet differs from the system")
    if Language(shift, ball.center).is_empty:
        raise ValueError("center is not a point of the system")
    fiber = forward_fiber(shift, ball.center, ball.epsilon, metric)
    if eps_list is None:
        e = min(ball.epsilon, 1.0)
        eps_list = (e / 2, e / 4, e / 8)
    est = estimate_cover_entropy(shift, fiber, n_max, eps_list, metric)
    est.extra["fiber"] = fiber
    return est
