"""Constructive entropy lowering by periodic free/pinned schedules.

Every output is a periodic schedule whose exact entropy is known in closed form
(rational multiple of log m, or a spectral radius for SFTs), so targets are
met to ``tol`` without estimation. ``certify`` re-derives the value with the
independent estimators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cover import estimate_cover_entropy, slope_fit, fit_grid
from .dimension import dim_entropy, moran_oracle
from .errors import NotMixing, TargetOutOfRange, ToleranceUnachievable
from .language import Language, schedule_entropy
from .symbolic import DigitSetSchedule, SubshiftSpec, is_mixing, spectral_entropy, spectral_radius

MAX_PERIOD = 10_000


@dataclass(frozen=True)
class LoweringRequest:
    ambient: SubshiftSpec
    target_h: float
    tol: float = 1e-3
    within: DigitSetSchedule | None = None

    def __post_init__(self):
        if self.target_h < 0:
            raise TargetOutOfRange("target entropy must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class ProductExperiment:
    """S_N = T x T^2 x ... x T^N on X^N with the max metric."""
    base: SubshiftSpec
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def powers(self) -> list[int]:
        return list(range(1, self.N + 1))


def _spread(k: int, q: int) -> list[bool]:
    """k marks spread evenly over q slots (Bresenham, first slot marked when k > 0)."""
    return [-(-(i + 1) * k // q) > -(-i * k // q) for i in range(q)]


def _best_fraction(target: float, unit: float, tol: float, max_q: int = MAX_PERIOD):
    """Smallest q (then k) with |k/q * unit - target| <= tol, 0 <= k <= q."""
    for q in range(1, max_q + 1):
        k = min(max(round(target * q / unit), 0), q)
        if abs(k / q * unit - target) <= tol:
            return k, q
    raise ToleranceUnachievable(f"no period <= {max_q} reaches {target} within {tol}")


def lower_in_full_shift(req: LoweringRequest) -> DigitSetSchedule:
    """Periodic schedule of free / pinned-to-0 positions with entropy (k/q) log m."""
    X = req.ambient
    if not X.is_full:
        raise ValueError("ambient must be a full shift")
    m = X.alphabet_size
    top = math.log(m)
    if req.target_h > top + req.tol:
        raise TargetOutOfRange(f"target {req.target_h} exceeds log {m} = {top:.6g}")
    if m == 1:
        return DigitSetSchedule.full(1)
    k, q = _best_fraction(min(req.target_h, top), top, req.tol)
    full, pin = frozenset(range(m)), frozenset([0])
    return DigitSetSchedule(m, period=tuple(full if f else pin for f in _spread(k, q)))


def lower_within_subset(req: LoweringRequest) -> DigitSetSchedule:
    """Sub-schedule of ``req.within``: r copies of its period, k kept, the rest pinned.

    Pinned copies use the least allowed digit at each position, so the result
    is positionwise inside the original schedule and has entropy (k/r) h(C).
    """
    C = req.within
    if C is None:
        raise ValueError("request has no 'within' schedule")
    if C.alphabet_size != req.ambient.alphabet_size:
        raise ValueError("within schedule and ambient differ in alphabet")
    hC = moran_oracle(C)
    if req.target_h > hC + req.tol:
        raise TargetOutOfRange(f"target {req.target_h} exceeds h(C) = {hC:.6g}")
    if hC == 0:
        k, r = 0, 1
    else:
        k, r = _best_fraction(min(req.target_h, hC), hC, req.tol, MAX_PERIOD // C.q)
    pinned = tuple(frozenset([min(a)]) for a in C.period)
    period = ()
    for keep in _spread(k, r):
        period += C.period if keep else pinned
    c0, ql = C.left_periodic_start()
    return DigitSetSchedule(
        C.alphabet_size, preperiod=C.preperiod, period=period, two_sided_rule="periodic",
        left_prefix=tuple(C.allowed(-j) for j in range(1, c0)),
        left_period=tuple(C.allowed(-c0 - t) for t in range(ql)))


def pin_word(shift: SubshiftSpec) -> tuple:
    """A self-loop symbol if one exists, else the symbols of a shortest cycle."""
    A = shift.adjacency
    last = [st[-1] for st in shift.states]
    for t in range(shift.n_states):
        if A[t, t]:
            return (last[t],)
    # BFS for the shortest cycle in the state graph
    best = None
    for s0 in range(shift.n_states):
        prev = {s0: None}
        frontier = [s0]
        found = None
        while frontier and found is None:
            nxt = []
            for u in frontier:
                for v in np.flatnonzero(A[u]):
                    v = int(v)
                    if v == s0:
                        found = u
                        break
                    if v not in prev:
                        prev[v] = u
                        nxt.append(v)
                if found is not None:
                    break
            frontier = nxt
        if found is None:
            continue
        path = [found]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        cyc = tuple(last[v] for v in reversed(path))
        if best is None or len(cyc) < len(best):
            best = cyc
    if best is None:
        raise NotMixing("shift has no cycle")
    return best


def _sft_schedule(m: int, a: int, b: int, pw: tuple) -> DigitSetSchedule:
    full = frozenset(range(m))
    period = (full,) * a + tuple(frozenset([pw[i % len(pw)]]) for i in range(b))
    return DigitSetSchedule(m, period=period)


def _sft_rate(shift: SubshiftSpec, a: int, b: int, pw: tuple) -> float:
    """(1/(a+b)) log rho(A^a prod_i A D_i), D_i masking states ending in pw[i]."""
    A = shift.adjacency.astype(float)
    last = np.array([st[-1] for st in shift.states])
    P = np.linalg.matrix_power(A, a) if a else np.eye(shift.n_states)
    for i in range(b):
        P = P @ A @ np.diag((last == pw[i % len(pw)]).astype(float))
    rho = spectral_radius(P, warn=False)
    return math.log(rho) / (a + b) if rho > 0 else -math.inf


def lower_in_sft(req: LoweringRequest, max_period: int = 64) -> DigitSetSchedule:
    """Alternate a free positions with b positions pinned along a cycle word.

    Scans periods a+b = 1..max_period and returns the first schedule whose
    exact rate is within tol of the target.
    """
    X = req.ambient
    if not is_mixing(X):
        raise NotMixing("ambient SFT must be mixing (primitive transition matrix)")
    h = spectral_entropy(X)
    if req.target_h > h + req.tol:
        raise TargetOutOfRange(f"target {req.target_h} exceeds h = {h:.6g}")
    m = X.alphabet_size
    pw = pin_word(X)
    if abs(h - req.target_h) <= req.tol:
        return DigitSetSchedule.full(m)
    if req.target_h <= req.tol:
        return _sft_schedule(m, 0, len(pw), pw)
    best = None
    for Q in range(2, max_period + 1):
        for a in range(1, Q):
            b = Q - a
            v = _sft_rate(X, a, b, pw)
            if v == -math.inf:
                continue
            err = abs(v - req.target_h)
            if best is None or err < best[0]:
                best = (err, a, b)
            if err <= req.tol:
                K = _sft_schedule(m, a, b, pw)
                if not Language(X, K).is_empty:
                    return K
    raise ToleranceUnachievable(
        f"best (a, b) = {best[1:] if best else None} misses target by {best[0] if best else 'inf'}")


def lower(req: LoweringRequest) -> DigitSetSchedule:
    """Dispatch on the request shape."""
    if req.within is not None:
        if not req.ambient.is_full:
            raise ValueError("'within' lowering is defined for full-shift ambients")
        return lower_within_subset(req)
    if req.ambient.is_full:
        return lower_in_full_shift(req)
    return lower_in_sft(req)


def exact_entropy(shift: SubshiftSpec, K: DigitSetSchedule) -> float:
    if shift.is_full:
        return 0.0 if Language(shift, K).is_empty else moran_oracle(K)
    return schedule_entropy(shift, K)


def certify(shift: SubshiftSpec, K: DigitSetSchedule, target: float, tol: float,
            n_max: int = 24, dim_tol: float = 1e-2) -> dict:
    """Exact value, cover-entropy estimate and h^B bracket for a lowering output."""
    exact = exact_entropy(shift, K)
    est = estimate_cover_entropy(shift, K, n_max=max(n_max, 2 * K.q))
    hb = dim_entropy(shift, K, tol=dim_tol)
    return {
        "target": target,
        "exact": exact,
        "exact_ok": abs(exact - target) <= tol,
        "cover_estimate": est.value,
        "cover_residual": est.residual,
        "hB_bracket": [hb.lower, hb.upper],
        "hB_ok": hb.lower - dim_tol <= exact <= hb.upper + dim_tol,
        "period": K.q,
    }


def diagonal_experiment(exp: ProductExperiment, n_max: int = 12, eps: float = 0.5,
                        tol: float = 0.05) -> dict:
    """h(S_N, diagonal) by separated counts under the max metric, for N' = 1..N.

    Under the max metric (x,..,x) and (y,..,y) are (n,eps)-close iff x and y
    agree on [-k, N(n-1)+k], so s_n is a window count of the base language.
    """
    base = exp.base
    h = spectral_entropy(base) if base.n_states else 0.0
    lang = Language(base)
    k = max(int(math.floor(-math.log2(eps))) if eps < 1 else -1, -1)
    grid = fit_grid(n_max)
    per_N = []
    rows = []
    for N in range(1, exp.N + 1):
        ends = [N * (n - 1) + k for n in range(1, n_max + 1)]
        a = -k if k >= 0 else 0
        counts = lang.counts_along(a, ends) if k >= 0 else {e: 1 for e in ends}
        logs = [math.log(max(counts[e], 1)) for e in ends]
        slope, res = slope_fit(grid, [logs[n - 1] for n in grid])
        est = max(slope, 0.0)
        lo, hi = N * h, N * (N + 1) / 2 * h
        per_N.append({"N": N, "estimate": est, "residual": res, "lower_bound": lo,
                      "upper_bound": hi, "lower_bound_check": est >= lo - tol,
                      "upper_bound_check": est <= hi + tol})
        rows += [{"N": N, "n": n, "s_n": counts[ends[n - 1]]} for n in range(1, n_max + 1)]
    last = per_N[-1]
    growth = [per_N[i + 1]["lower_bound"] - per_N[i]["lower_bound"] for i in range(len(per_N) - 1)]
    return {
        "N": exp.N, "h_base": h, "estimate": last["estimate"],
        "lower_bound_check": all(r["lower_bound_check"] for r in per_N),
        "upper_bound_check": all(r["upper_bound_check"] for r in per_N),
        "estimates": per_N, "lower_bound_growth": growth, "rows": rows,
    }
