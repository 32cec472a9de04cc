"""Bowen dimensional entropy of schedule sets.

``m_value`` brackets m_{T,U}(K, lambda, k): the upper bound is the cheapest
cylinder cover found by a DP over the word tree of K, the lower bound comes
from the mass distribution principle. ``dim_entropy`` bisects on lambda.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .cover import CoverSpec
from .errors import DepthCapTooSmall, Inconclusive
from .language import Language
from .symbolic import DigitSetSchedule, ScheduleUnion, SubshiftSpec, as_word, subset_parts

INF = math.inf


@dataclass
class CylinderElement:
    word: tuple
    anchor: int = 0
    n_value: float | None = None

    def __post_init__(self):
        self.word = as_word(self.word)

    def schedule(self, m: int) -> DigitSetSchedule:
        return DigitSetSchedule.cylinder(m, self.word, self.anchor)

    def recompute(self, shift: SubshiftSpec, U: CoverSpec, power: int = 1) -> float:
        return n_value(self, U, shift, power)


@dataclass
class WeightedCylinderCover:
    elements: list
    lam: float
    k_floor: int
    weight_sum: float


@dataclass
class CriticalExponent:
    lower: float
    upper: float
    iterations: int
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower must not exceed upper")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)


def _n_from_length(length, depth: int, power: int):
    if length == INF:
        return INF
    if length < depth:
        return 0
    return (length - depth) // power + 1


def _determined_length(lang: Language, a: int) -> float:
    """Number of consecutive coordinates from ``a`` on which the set has one symbol."""
    s = lang.s
    for L in range(1, s + 1):
        if lang.count_window(a, a + L - 1) > 1:
            return L - 1
    (w, t, mk), = lang.walk(a, a + s - 1)
    return s + lang.forced_run(a + s, t, mk)


def n_value(E, U: CoverSpec, shift: SubshiftSpec | None = None, power: int = 1) -> float:
    """n_{T^power, U}(E): how many iterates E stays inside a single cell of U.

    ``E`` is a :class:`CylinderElement`, a schedule, or a union. Returns ``inf``
    only for sets whose whole forward coordinate range is forced (e.g. periodic
    singletons) and for the empty set.
    """
    if U.kind != "partition":
        raise ValueError("n_value needs a word-partition cover")
    if isinstance(E, CylinderElement):
        m = shift.alphabet_size if shift is not None else max(E.word, default=0) + 1
        K = E.schedule(m)
    else:
        K = E
        m = shift.alphabet_size if shift is not None else _alphabet(K)
    shift = shift or SubshiftSpec.full(m)
    if U.depth == 0:
        return INF
    lang = Language(shift, K)
    if lang.is_empty:
        return INF
    val = _n_from_length(_determined_length(lang, -U.offset), U.depth, power)
    if isinstance(E, CylinderElement):
        E.n_value = val
    return val


def _close(lam: float, n) -> float:
    """log e^{-lam n} with the conventions for n = inf."""
    if n == INF:
        return -INF if lam > 0 else (0.0 if lam == 0 else INF)
    return -lam * n


class _Tree:
    """Word tree of K below the cover anchor, with forced runs per node."""

    def __init__(self, shift: SubshiftSpec, K, U: CoverSpec, power: int):
        if U.kind != "partition" or U.depth < 1:
            raise ValueError("dimensional entropy needs a block partition of depth >= 1")
        self.shift, self.U, self.p = shift, U, power
        self.lang = Language(shift, K)
        self.a = -U.offset
        self.D = U.depth
        self.root_n = None

    def levels_for(self, n_cap: int) -> int:
        return self.p * (n_cap - 1) + self.D

    def build(self, L_cap: int):
        """Nodes per level ``s..L_cap`` as dicts (t, mk) -> (children, forced run)."""
        lang, a, s = self.lang, self.a, self.lang.s
        L_cap = max(L_cap, s)
        first = {(t, mk) for _, t, mk in lang.walk(a, a + s - 1)}
        levels = {s: first}
        for ell in range(s, L_cap):
            nxt = set()
            for t, mk in levels[ell]:
                nxt.update(lang.children(a + ell, t, mk))
            levels[ell + 1] = nxt
        kids = {}
        fr = {}
        for ell in range(L_cap, s - 1, -1):
            for node in levels[ell]:
                ch = lang.children(a + ell, *node) if ell < L_cap else None
                kids[ell, node] = ch
                if ell == L_cap:
                    fr[ell, node] = lang.forced_run(a + ell, *node)
                elif len(ch) == 1:
                    fr[ell, node] = 1 + fr[ell + 1, ch[0]]
                else:
                    fr[ell, node] = 0
        self.levels, self.kids, self.fr, self.L_cap, self.s = levels, kids, fr, L_cap, s
        self.root_n = _n_from_length(_determined_length(lang, a), self.D, self.p)
        return self

    def node_n(self, ell, node):
        return _n_from_length(ell + self.fr[ell, node], self.D, self.p)

    def upper_log(self, lam: float, k: int, L_cap: int) -> tuple[float, dict]:
        """log of the cheapest cover with every n >= k and cylinder length <= L_cap."""
        val = {}
        choice = {}
        for ell in range(L_cap, self.s - 1, -1):
            for node in self.levels[ell]:
                n = self.node_n(ell, node)
                close = _close(lam, n) if n >= k else INF
                if ell == L_cap:
                    val[ell, node] = close
                    choice[ell, node] = True
                    continue
                ch = self.kids[ell, node]
                sub = [val[ell + 1, c] for c in ch]
                if any(v == INF for v in sub):
                    rec = INF
                else:
                    rec = float(logsumexp(sub)) if sub else -INF
                if close <= rec:
                    val[ell, node], choice[ell, node] = close, True
                else:
                    val[ell, node], choice[ell, node] = rec, False
        roots = [val[self.s, node] for node in self.levels[self.s]]
        total = INF if any(v == INF for v in roots) else float(logsumexp(roots))
        if self.root_n is not None and self.root_n >= k:
            total = min(total, _close(lam, self.root_n))
        return total, choice


def _uses_product(tree: _Tree) -> bool:
    return tree.shift.is_full and len(tree.lang.parts) == 1


def _log_mu_max(tree: _Tree, K, L_max: int) -> tuple[np.ndarray, bool]:
    """g(L) = -log max_w mu(w) over cylinders of length L = 0..L_max.

    Product measure (exact) when K is one schedule in a full shift; otherwise
    the uniform measure on realized words at the tree's horizon (twice L_max,
    so the ratios are asymptotic over the range used), counted backwards.
    """
    parts = tree.lang.parts
    a = tree.a
    g = np.zeros(L_max + 1)
    if _uses_product(tree):
        K0 = parts[0]
        for L in range(1, L_max + 1):
            g[L] = g[L - 1] + math.log(len(K0.allowed(a + L - 1)))
        return g, True
    s = tree.lang.s
    H = tree.L_cap
    ext = {node: 1 for node in tree.levels[H]}
    best = {H: 1}
    for ell in range(H - 1, s - 1, -1):
        cur = {}
        for node in tree.levels[ell]:
            cur[node] = sum(ext[c] for c in tree.kids[ell, node])
        ext = cur
        best[ell] = max(cur.values())
    total = sum(ext.values())
    for L in range(1, L_max + 1):
        # short prefixes: bound by the first full-state level
        b = best[max(L, s)]
        g[L] = math.log(total) - math.log(b)
    return g, False


def _lower_log(g: np.ndarray, lam: float, k: int, tree: _Tree, window: int) -> float:
    """log inf_{j>=k} mu_max(L(j))^{-1} e^{-lam j}, with a periodic tail."""
    js = [j for j in range(1, 10 ** 6) if tree.levels_for(j) < len(g)]
    if not js or k > js[-1]:
        return -INF
    vals = {j: g[tree.levels_for(j)] - lam * j for j in js}
    lo = min(vals[j] for j in js if j >= k)
    jmax = js[-1]
    j0 = max(1, jmax - window)
    slope = (vals[jmax] - vals[j0]) / (jmax - j0) if jmax > j0 else -INF
    if slope <= 1e-12:
        return -INF
    return lo


def _prepare(shift, K, U, power):
    parts = subset_parts(K, shift.alphabet_size)
    Q = math.lcm(*(p.q for p in parts)) if parts else 1
    pre = max((p.p for p in parts), default=0)
    W = Q * math.ceil(4 / Q)
    return parts, Q, pre, W


def m_value(shift: SubshiftSpec, K, U: CoverSpec, lam: float, k: int, depth_cap: int = 26,
            power: int = 1) -> tuple[float, float]:
    """(lower, upper) bounds on m_{T^power, U}(K, lam, k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > depth_cap:
        raise DepthCapTooSmall(f"k={k} exceeds depth_cap={depth_cap}")
    lang = Language(shift, K)
    if lang.is_empty:
        v = INF if lam < 0 else (1.0 if lam == 0 else 0.0)
        return v, v
    _, _, _, W = _prepare(shift, K, U, power)
    tree = _Tree(shift, K, U, power)
    L_cap = tree.levels_for(depth_cap)
    tree.build(L_cap if _uses_product(tree) else 2 * L_cap)
    up, _ = tree.upper_log(lam, k, L_cap)
    g, _ = _log_mu_max(tree, K, L_cap)
    low = _lower_log(g, lam, k, tree, W)
    return math.exp(min(low, up)) if low > -INF else 0.0, math.exp(up) if up < 700 else INF


def best_cover(shift: SubshiftSpec, K, U: CoverSpec, lam: float, k: int, depth_cap: int = 12,
               power: int = 1, limit: int = 100_000) -> WeightedCylinderCover:
    """Materialize the DP-optimal cylinder cover (small depth caps only)."""
    tree = _Tree(shift, K, U, power)
    L_cap = tree.levels_for(depth_cap)
    tree.build(L_cap)
    total, choice = tree.upper_log(lam, k, L_cap)
    if tree.root_n is not None and tree.root_n >= k and _close(lam, tree.root_n) <= total:
        el = CylinderElement((), tree.a, tree.root_n)
        return WeightedCylinderCover([el], lam, k, math.exp(_close(lam, tree.root_n)))
    lang, a = tree.lang, tree.a
    out = []
    stack = [(w, tree.s, (t, mk)) for w, t, mk in lang.walk(a, a + tree.s - 1)]
    while stack:
        w, ell, node = stack.pop()
        if choice[ell, node]:
            out.append(CylinderElement(w, a, tree.node_n(ell, node)))
            if len(out) > limit:
                raise DepthCapTooSmall("cover too large to materialize")
            continue
        for c in tree.kids[ell, node]:
            stack.append((w + (shift.states[c[0]][-1],), ell + 1, c))
    out.sort(key=lambda e: e.word)
    weight = sum(math.exp(_close(lam, e.n_value)) for e in out)
    return WeightedCylinderCover(out, lam, k, weight)


def dim_entropy(shift: SubshiftSpec, K=None, U: CoverSpec | None = None, tol: float = 1e-3,
                depth_cap: int = 26, power: int = 1, max_iter: int = 60) -> CriticalExponent:
    """Bracket h^B_U(T^power, K) by bisection on lambda.

    lambda is "below" when the mass-distribution bound is positive and "above"
    when the best cover weight U(k) decays from k1 = cap - 2W to k2 = cap - W
    (W a multiple of the schedule period). Neither: :class:`Inconclusive`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    U = U or CoverSpec.blocks(1)
    lang = Language(shift, K)
    if lang.is_empty:
        return CriticalExponent(0.0, 0.0, 0, {"empty": True})
    parts, Q, pre, W = _prepare(shift, K, U, power)
    cap = max(depth_cap, math.ceil(pre / power) + 3 * W + 1)
    tree = _Tree(shift, K, U, power)
    L_cap = tree.levels_for(cap)
    tree.build(L_cap if _uses_product(tree) else 2 * L_cap)
    g, exact_measure = _log_mu_max(tree, K, L_cap)
    k2, k1 = cap - W, cap - 2 * W

    def weight(lam, k):
        return tree.upper_log(lam, k, tree.levels_for(k + W))[0]

    def side(lam):
        if _lower_log(g, lam, 1, tree, W) > -INF:
            return -1
        u2, u1 = weight(lam, k2), weight(lam, k1)
        return 1 if (u2 == -INF or u2 < u1) else 0

    lo, hi = 0.0, power * math.log(shift.alphabet_size) if shift.alphabet_size > 1 else 0.0
    it = 0
    while hi - lo > tol and it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        where = side(mid)
        if where == 0:
            # numerically at the critical value: straddle it
            d = tol / 4
            if side(mid - d) == -1 and side(mid + d) == 1:
                lo, hi = mid - d, mid + d
                break
            raise Inconclusive(f"bounds at depth cap {cap} cannot place lambda={mid:.6g}", (lo, hi))
        if where < 0:
            lo = mid
        else:
            hi = mid
    return CriticalExponent(lo, hi, it, {"depth_cap_used": cap, "window": W,
                                         "product_measure": exact_measure})


def moran_oracle(K, m: int | None = None) -> float:
    """(1/q) sum_j log|period_j| for a schedule; max over the parts of a union."""
    parts = subset_parts(K, m if m is not None else _alphabet(K))
    if not parts:
        return 0.0
    vals = []
    for p in parts:
        if any(len(a) == 0 for a in p.period):
            raise ValueError("allowed sets must be nonempty")
        vals.append(sum(math.log(len(a)) for a in p.period) / len(p.period))
    return max(vals)


def _alphabet(K) -> int:
    if isinstance(K, DigitSetSchedule):
        return K.alphabet_size
    if isinstance(K, ScheduleUnion) and K.parts:
        return K.parts[0].alphabet_size
    raise ValueError("cannot infer alphabet size")
