"""Digit Cantor sets on the circle R/Z and their Hausdorff dimension.

A schedule over digits 0..m-1 projects to the circle through
pi(x) = sum_{j>=0} x_j m^{-(j+1)}, which conjugates the shift to T_m(t) = m t mod 1.
Only coordinates j >= 0 matter for the image.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dimension import dim_entropy, moran_oracle
from .cover import CoverSpec, slope_fit
from .errors import DepthOverflow, Inconclusive, ScaleUnderflow
from .language import Language
from .symbolic import DigitSetSchedule, SubshiftSpec, as_word, subset_parts

K_MAX = 400
ARC_LIMIT = 2_000_000
FINE = 40


@dataclass(frozen=True)
class CircleSet:
    """pi(source) for a schedule (or union) over digits 0..base-1."""
    source: object
    base: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        subset_parts(self.source, self.base)

    @classmethod
    def digits(cls, base: int, digits) -> "CircleSet":
        return cls(DigitSetSchedule.digits(base, digits), base)

    @classmethod
    def from_one_based_digits(cls, base: int, digits) -> "CircleSet":
        """Digits given in 1..m (as in x_j - 1 of the projection formula)."""
        ds = [d - 1 for d in digits]
        if any(not 0 <= d < base for d in ds):
            raise ValueError("one-based digits must lie in 1..base")
        return cls.digits(base, ds)

    @classmethod
    def circle(cls, base: int) -> "CircleSet":
        return cls(DigitSetSchedule.full(base), base)

    @property
    def parts(self) -> tuple:
        return subset_parts(self.source, self.base)

    @property
    def shift(self) -> SubshiftSpec:
        return SubshiftSpec.full(self.base)

    def language(self) -> Language:
        return Language(self.shift, self.source)

    def arc_count(self, k: int) -> int:
        if k == 0:
            return 0 if self.language().is_empty else 1
        return self.language().count_window(0, k - 1)

    def description(self) -> str:
        return f"pi(schedule) in base {self.base}"


def circle_point(digits, base: int, prefix=()) -> float:
    """pi of the point with forward digits ``prefix`` then ``digits`` repeated."""
    pre = as_word(prefix)
    per = as_word(digits)
    val = sum(d * base ** -(j + 1) for j, d in enumerate(pre))
    q = len(per)
    if q:
        cyc = sum(d * base ** -(j + 1) for j, d in enumerate(per))
        val += base ** -len(pre) * cyc / (1 - base ** -q)
    val %= 1.0
    return 0.0 if 1.0 - val < 1e-15 else val


def circle_map(t: float, base: int) -> float:
    """T_m(t) = m t mod 1."""
    return (base * t) % 1.0


def pi_complex(t: float) -> complex:
    return complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))


@dataclass
class DimensionEstimate:
    value: float
    method: str
    scales_used: list = field(default_factory=list)
    residual: float = 0.0
    bounds: tuple | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError("dimension of a circle subset lies in [0, 1]")
        self.value = min(max(self.value, 0.0), 1.0)


def project_intervals(C: CircleSet, k: int) -> np.ndarray:
    """Generation-k arcs meeting pi(C): array of (left endpoint, length)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if C.arc_count(k) > ARC_LIMIT:
        raise DepthOverflow(f"more than {ARC_LIMIT} arcs at generation {k}")
    words = C.language().words(0, k - 1)
    weights = float(C.base) ** -np.arange(1, k + 1)
    if not words:
        return np.zeros((0, 2))
    left = np.asarray(words, dtype=float) @ weights
    return np.column_stack([left, np.full(len(words), float(C.base) ** -k)])


def _k_for_delta(delta: float, base: int) -> int:
    k = 0
    while base ** -k > delta * (1 + 1e-12):
        k += 1
        if k > K_MAX:
            raise ScaleUnderflow(f"delta={delta} is below base^-{K_MAX}")
    return k


def _log_upper(C: CircleSet, t: float, k0: int, span: int = 64) -> float:
    """log min_{k0<=k<k0+span} N_k m^{-kt}."""
    lang = C.language()
    if lang.is_empty:
        return -math.inf
    ks = list(range(max(k0, 1), max(k0, 1) + span))
    counts = lang.counts_along(0, [k - 1 for k in ks], exact=False)
    vals = [counts[k - 1] - k * t * math.log(C.base) for k in ks]
    if k0 == 0:
        vals.append(0.0)
    return min(vals)


def _log_sup_ratio(part: DigitSetSchedule, base: int, t: float, j0: int, delta: float) -> float:
    """log sup mu(I)/|I|^t over arcs I with |I| <= delta, for the product measure.

    Arcs of length r in (m^-(j+1), m^-j] meet at most floor(r m^J) + 2 arcs of
    generation J >= j, each of mass <= mu_max(J).
    """
    lm = math.log(base)
    h_per = sum(math.log(len(a)) for a in part.period)
    q = part.q
    if t * lm * q > h_per + 1e-12:
        return math.inf
    j_end = max(j0, part.p) + 2 * q + 1
    # cumulative -log mu_max
    cum = [0.0]
    for i in range(j_end + FINE + 1):
        cum.append(cum[-1] + math.log(len(part.allowed(i))))
    best = -math.inf
    for j in range(j0, j_end + 1):
        r_hi = min(base ** -j, delta)
        r_lo = base ** -(j + 1)
        if r_hi <= r_lo:
            continue
        terms = []
        for J in (j, j + FINE // 2, j + FINE):
            a1 = J * lm - cum[J] + (1 - t) * math.log(r_hi if t <= 1 else r_lo)
            a2 = math.log(2) - cum[J] - t * math.log(r_lo)
            terms.append(np.logaddexp(a1, a2))
        best = max(best, min(terms))
    return best


def hausdorff_measure_approx(C: CircleSet, t: float, delta: float) -> tuple[float, float]:
    """(lower, upper) bounds on H^{t,delta}(pi(C))."""
    if not 0 <= t <= 1.5:
        raise ValueError("t must lie in [0, 1.5]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    k0 = _k_for_delta(delta, C.base)
    lang = C.language()
    if lang.is_empty:
        return 0.0, 0.0
    up = _log_upper(C, t, k0)
    lows = []
    for part in C.parts:
        if Language(C.shift, part).is_empty:
            continue
        lows.append(-_log_sup_ratio(part, C.base, t, max(k0 - 1, 0), delta))
    low = max(lows)
    low = min(low, up)
    return (math.exp(low) if low > -math.inf else 0.0), math.exp(up)


def box_count_dimension(C: CircleSet, ks=range(6, 13)) -> DimensionEstimate:
    """Slope of log N_k against k log m."""
    ks = list(ks)
    lang = C.language()
    if lang.is_empty:
        return DimensionEstimate(0.0, "box-count", [C.base ** -k for k in ks])
    counts = lang.counts_along(0, [k - 1 for k in ks], exact=False)
    x = [k * math.log(C.base) for k in ks]
    slope, res = slope_fit(x, [counts[k - 1] for k in ks])
    return DimensionEstimate(min(max(slope, 0.0), 1.0), "box-count",
                             [C.base ** -k for k in ks], res)


def hausdorff_dimension(C: CircleSet, tol: float = 1e-3) -> DimensionEstimate:
    """dim_H pi(C): Moran closed form for one schedule, bisection for unions."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    box = box_count_dimension(C)
    lm = math.log(C.base)
    parts = [p for p in C.parts if not Language(C.shift, p).is_empty]
    if not parts:
        return DimensionEstimate(0.0, "moran-closed-form", extra={"empty": True})
    if len(parts) == 1:
        v = moran_oracle(parts[0]) / lm
        return DimensionEstimate(v, "moran-closed-form", box.scales_used, box.residual,
                                 (v, v), {"box_count": box.value})

    def side(t):
        if any(_log_sup_ratio(p, C.base, t, 0, 1.0) < math.inf for p in parts):
            return -1
        W = 4 * math.lcm(*(p.q for p in parts))
        k1 = max(p.p for p in parts) + W
        u1 = _log_upper(C, t, k1, 1)
        u2 = _log_upper(C, t, k1 + W, 1)
        return 1 if u2 < u1 else 0

    lo, hi, it = 0.0, 1.0, 0
    while hi - lo > tol:
        it += 1
        mid = 0.5 * (lo + hi)
        where = side(mid)
        if where == 0:
            d = tol / 4
            if side(mid - d) == -1 and side(mid + d) == 1:
                lo, hi = mid - d, mid + d
                break
            raise Inconclusive(f"measure bounds cannot place t={mid:.6g}", (lo, hi))
        lo, hi = (mid, hi) if where < 0 else (lo, mid)
    return DimensionEstimate(0.5 * (lo + hi), "bisection", box.scales_used, box.residual,
                             (lo, hi), {"iterations": it, "box_count": box.value})


def bridge_check(C: CircleSet, tol: float = 1e-3, depth_cap: int = 26) -> dict:
    """Compare dim_H pi(C) with h^B(T_m, C)/log m from the Bowen pipeline."""
    hd = hausdorff_dimension(C, tol)
    lm = math.log(C.base)
    hb = dim_entropy(C.shift, C.source, CoverSpec.blocks(1), tol * lm, depth_cap)
    lo, hi = hb.lower / lm, hb.upper / lm
    H_lo, H_hi = hd.bounds if hd.bounds else (hd.value, hd.value)
    gap = hd.value - 0.5 * (lo + hi)
    return {
        "H_d": hd.value,
        "H_d_bounds": [H_lo, H_hi],
        "hB_over_logm": 0.5 * (lo + hi),
        "hB_over_logm_bounds": [lo, hi],
        "gap": gap,
        "lower_certificate": H_hi >= lo - 2 * tol,
        "upper_certificate": H_lo <= hi + 2 * tol,
        "passed": abs(gap) <= tol,
        "tol": tol,
    }
