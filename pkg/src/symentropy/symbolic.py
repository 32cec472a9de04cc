"""Subshifts, digit schedules, sliding block codes and the spectral entropy oracle.

Symbols are 0-indexed integers ``0..m-1`` throughout. A subshift is stored as a
vertex shift on its ``s``-blocks (``s = max(1, memory - 1)``), trimmed to the
states that carry bi-infinite paths so that every word of the graph language
extends to a point in both directions.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    IncompatibleAlphabet,
    InadmissibleWord,
    NotIrreducibleWarning,
    WordTooShort,
)

Word = tuple  # tuple[int, ...]


def as_word(w) -> Word:
    """Accept ``"0101"``, ``[0, 1, 0, 1]`` or a tuple and return a tuple of ints."""
    if isinstance(w, str):
        return tuple(int(ch) for ch in w)
    return tuple(int(x) for x in w)


def _trim(adj: np.ndarray) -> np.ndarray:
    """Boolean mask of states lying on a bi-infinite path."""
    keep = np.ones(adj.shape[0], dtype=bool)
    while True:
        sub = adj & keep[None, :] & keep[:, None]
        new = keep & sub.any(axis=1) & sub.any(axis=0)
        if (new == keep).all():
            return keep
        keep = new


class SubshiftSpec:
    """A two-sided subshift of finite type over ``{0..alphabet_size-1}``.

    Exactly one of ``forbidden`` and ``matrix`` may be given; with neither the
    full shift is built.
    """

    def __init__(self, alphabet_size: int, forbidden: Iterable | None = None,
                 matrix=None, name: str | None = None):
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        if forbidden is not None and matrix is not None:
            raise ValueError("give forbidden words or a transition matrix, not both")
        self.alphabet_size = m = int(alphabet_size)
        self.name = name
        if matrix is not None:
            A = np.asarray(matrix, dtype=int)
            if A.shape != (m, m) or not np.isin(A, (0, 1)).all():
                raise ValueError(f"transition matrix must be a {m}x{m} 0/1 matrix")
            self.forbidden = tuple(sorted((a, b) for a in range(m) for b in range(m) if not A[a, b]))
            self.transition_matrix = A
            self.memory = 2
            states = [(a,) for a in range(m)]
            adj = A.astype(bool)
        else:
            words = tuple(sorted({as_word(w) for w in (forbidden or ())}))
            for w in words:
                if not w:
                    raise ValueError("forbidden words must be non-empty")
                if any(not 0 <= x < m for x in w):
                    raise IncompatibleAlphabet(f"forbidden word {w} uses symbols outside 0..{m - 1}")
            self.forbidden = words
            self.transition_matrix = None
            self.memory = max((len(w) for w in words), default=1)
            s = max(1, self.memory - 1)

            def clean(w):
                return not any(_contains(w, f) for f in words)

            states = [w for w in itertools.product(range(m), repeat=s) if clean(w)]
            index = {w: i for i, w in enumerate(states)}
            adj = np.zeros((len(states), len(states)), dtype=bool)
            for i, u in enumerate(states):
                for x in range(m):
                    v = u[1:] + (x,)
                    j = index.get(v)
                    if j is not None and clean(u + (x,)):
                        adj[i, j] = True
        keep = _trim(adj) if len(states) else np.zeros(0, dtype=bool)
        idx = np.flatnonzero(keep)
        self.states = tuple(states[i] for i in idx)
        self.state_length = max(1, self.memory - 1) if matrix is None else 1
        self.adjacency = adj[np.ix_(idx, idx)].copy()
        self.adjacency.setflags(write=False)
        self.state_array = np.array(self.states, dtype=int).reshape(len(self.states), self.state_length)
        self.state_array.setflags(write=False)
        self._state_index = {w: i for i, w in enumerate(self.states)}

    # -- constructors -------------------------------------------------------
    @classmethod
    def full(cls, m: int) -> "SubshiftSpec":
        return cls(m, name=f"full-{m}")

    @classmethod
    def golden_mean(cls) -> "SubshiftSpec":
        return cls(2, forbidden=[(1, 1)], name="golden-mean")

    @classmethod
    def from_matrix(cls, matrix) -> "SubshiftSpec":
        A = np.asarray(matrix)
        return cls(A.shape[0], matrix=A)

    # -- queries ------------------------------------------------------------
    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def is_empty(self) -> bool:
        return self.n_states == 0

    @property
    def is_full(self) -> bool:
        return not self.forbidden

    def state_index(self, w) -> int | None:
        return self._state_index.get(tuple(w))

    def is_admissible(self, word) -> bool:
        """True when ``word`` occurs in some point of the shift."""
        from .language import Language
        w = as_word(word)
        if not w:
            return not self.is_empty
        if any(not 0 <= x < self.alphabet_size for x in w):
            return False
        K = DigitSetSchedule.cylinder(self.alphabet_size, w)
        return Language(self, K).count_window(0, len(w) - 1) > 0

    def __repr__(self):
        if self.name:
            return f"SubshiftSpec({self.name!r})"
        return f"SubshiftSpec(m={self.alphabet_size}, forbidden={self.forbidden})"


def _contains(w, f) -> bool:
    n, k = len(w), len(f)
    return any(w[i:i + k] == f for i in range(n - k + 1))


@dataclass(frozen=True)
class MetricParams:
    """d(x, y) = base ** -min{|i| : x_i != y_i}."""
    base: float = 2.0

    def __post_init__(self):
        if not self.base > 1:
            raise ValueError("metric base must exceed 1")

    def window_radius(self, eps: float) -> int:
        """Largest k with d(x,y) <= eps  <=>  x, y agree on [-k, k].

        Returns -1 when eps >= 1 (every pair is within eps).
        """
        if eps <= 0:
            raise ValueError("eps must be positive")
        if eps >= 1:
            return -1
        k = math.floor(-math.log(eps) / math.log(self.base) + 1e-12)
        # eps in [base^-(k+1), base^-k)
        while self.base ** -(k + 1) > eps:
            k += 1
        while self.base ** -k <= eps:
            k -= 1
        return k

    def distance(self, x: Mapping[int, int], y: Mapping[int, int], radius: int) -> float:
        """Distance between two points given on coordinates ``-radius..radius``."""
        for r in range(radius + 1):
            if x[r] != y[r] or x[-r] != y[-r]:
                return self.base ** -r
        return 0.0


TWO_SIDED_RULES = ("free", "mirrored", "pinned", "periodic")


def _sets(seq, m):
    out = []
    for a in seq:
        fs = frozenset(int(x) for x in a)
        if not fs:
            raise ValueError("allowed sets must be non-empty")
        if any(not 0 <= x < m for x in fs):
            raise IncompatibleAlphabet(f"allowed set {sorted(fs)} not inside 0..{m - 1}")
        out.append(fs)
    return tuple(out)


@dataclass(frozen=True)
class DigitSetSchedule:
    """Per-coordinate allowed-symbol sets, eventually periodic in both directions.

    Coordinates ``0..p-1`` use ``preperiod``; coordinates ``>= p`` cycle through
    ``period``. Negative coordinates ``-1..-r`` use ``left_prefix``; beyond that
    ``two_sided_rule`` decides: ``free`` (whole alphabet), ``mirrored``
    (coordinate ``-j`` copies coordinate ``j-1``), ``pinned`` (coordinate ``j``
    is ``pin_word[j mod len]``) or ``periodic`` (coordinate ``-r-1-t`` uses
    ``left_period[t mod len]``).
    """
    alphabet_size: int
    preperiod: tuple = ()
    period: tuple = ()
    two_sided_rule: str = "free"
    pin_word: tuple = ()
    left_prefix: tuple = ()
    left_period: tuple = ()

    def __post_init__(self):
        m = self.alphabet_size
        if m < 1:
            raise ValueError("alphabet_size must be >= 1")
        period = _sets(self.period, m) if self.period else (frozenset(range(m)),)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "preperiod", _sets(self.preperiod, m))
        object.__setattr__(self, "left_prefix", _sets(self.left_prefix, m))
        object.__setattr__(self, "left_period", _sets(self.left_period, m))
        if self.two_sided_rule not in TWO_SIDED_RULES:
            raise ValueError(f"two_sided_rule must be one of {TWO_SIDED_RULES}")
        pin = as_word(self.pin_word)
        if self.two_sided_rule == "pinned":
            if not pin:
                raise ValueError("pinned rule needs a non-empty pin_word")
            if any(not 0 <= x < m for x in pin):
                raise IncompatibleAlphabet("pin_word outside the alphabet")
        if self.two_sided_rule == "periodic" and not self.left_period:
            raise ValueError("periodic rule needs a non-empty left_period")
        object.__setattr__(self, "pin_word", pin)

    # -- constructors -------------------------------------------------------
    @classmethod
    def full(cls, m: int) -> "DigitSetSchedule":
        return cls(m)

    @classmethod
    def periodic(cls, m: int, period, preperiod=(), **kw) -> "DigitSetSchedule":
        return cls(m, preperiod=tuple(preperiod), period=tuple(period), **kw)

    @classmethod
    def digits(cls, m: int, digits) -> "DigitSetSchedule":
        """All coordinates restricted to one digit set (a Cantor-type set)."""
        return cls(m, period=(frozenset(digits),))

    @classmethod
    def cylinder(cls, m: int, word, anchor: int = 0) -> "DigitSetSchedule":
        """Points whose coordinates ``anchor..anchor+len-1`` spell ``word``."""
        w = as_word(word)
        full = frozenset(range(m))
        coords = {anchor + i: frozenset([x]) for i, x in enumerate(w)}
        hi = max((c for c in coords if c >= 0), default=-1)
        lo = min((c for c in coords if c < 0), default=0)
        pre = tuple(coords.get(i, full) for i in range(hi + 1))
        left = tuple(coords.get(-j, full) for j in range(1, -lo + 1))
        return cls(m, preperiod=pre, left_prefix=left)

    @classmethod
    def point(cls, m: int, forward_period, forward_prefix=(), left_period=None) -> "DigitSetSchedule":
        """A single eventually periodic point. Negative coordinates ``j`` read
        ``left_period[j mod len]`` (default: ``forward_period``)."""
        fp = as_word(forward_period)
        pre = [frozenset([x]) for x in as_word(forward_prefix)]
        lp = as_word(left_period) if left_period is not None else fp
        return cls(m, preperiod=tuple(pre), period=tuple(frozenset([x]) for x in fp),
                   two_sided_rule="pinned", pin_word=lp)

    # -- coordinate access --------------------------------------------------
    @property
    def p(self) -> int:
        return len(self.preperiod)

    @property
    def q(self) -> int:
        return len(self.period)

    @property
    def is_point(self) -> bool:
        c0, ql = self.left_periodic_start()
        span = range(-c0 - ql, max(self.p, 1) + self.q)
        return all(len(self.allowed(i)) == 1 for i in span)

    def allowed(self, i: int) -> frozenset:
        if i >= 0:
            if i < self.p:
                return self.preperiod[i]
            return self.period[(i - self.p) % self.q]
        j = -i
        r = len(self.left_prefix)
        if j <= r:
            return self.left_prefix[j - 1]
        rule = self.two_sided_rule
        if rule == "free":
            return frozenset(range(self.alphabet_size))
        if rule == "mirrored":
            return self.allowed(j - 1)
        if rule == "periodic":
            return self.left_period[(j - r - 1) % len(self.left_period)]
        return frozenset([self.pin_word[i % len(self.pin_word)]])

    def left_periodic_start(self) -> tuple[int, int]:
        """(c0, ql): coordinates ``<= -c0`` are periodic with period ``ql``."""
        r = len(self.left_prefix)
        rule = self.two_sided_rule
        if rule == "free":
            return r + 1, 1
        if rule == "pinned":
            return r + 1, len(self.pin_word)
        if rule == "periodic":
            return r + 1, len(self.left_period)
        return max(r + 1, self.p + 1), self.q

    # -- derived schedules --------------------------------------------------
    def shift(self, i: int = 1) -> "DigitSetSchedule":
        """Schedule of ``T^i K`` (coordinate j of the image is coordinate j+i of K)."""
        if i < 0:
            raise ValueError("only forward shifts are supported")
        if i == 0:
            return self
        c0, ql = self.left_periodic_start()
        new_pre = tuple(self.allowed(j + i) for j in range(max(self.p - i, 0)))
        rot = (i - self.p) % self.q if i > self.p else 0
        new_period = self.period[rot:] + self.period[:rot]
        # new coordinate -j is old coordinate i-j; old coords <= -c0 are periodic
        new_left = tuple(self.allowed(i - j) for j in range(1, i + c0))
        left_period = tuple(self.allowed(-c0 - t) for t in range(ql))
        return DigitSetSchedule(self.alphabet_size, preperiod=new_pre, period=new_period,
                                two_sided_rule="periodic", left_prefix=new_left,
                                left_period=left_period)

    def positionwise_subset_of(self, other: "DigitSetSchedule") -> bool:
        """Exact check that every forward allowed set is inside ``other``'s."""
        if self.alphabet_size != other.alphabet_size:
            return False
        span = max(self.p, other.p) + math.lcm(self.q, other.q)
        return all(self.allowed(i) <= other.allowed(i) for i in range(span))

    def to_json(self) -> dict:
        d = {"alphabet": self.alphabet_size,
             "preperiod": [sorted(a) for a in self.preperiod],
             "period": [sorted(a) for a in self.period],
             "two_sided": self.two_sided_rule}
        if self.pin_word:
            d["pin_word"] = list(self.pin_word)
        if self.left_prefix:
            d["left_prefix"] = [sorted(a) for a in self.left_prefix]
        if self.left_period:
            d["left_period"] = [sorted(a) for a in self.left_period]
        return d


@dataclass(frozen=True)
class ScheduleUnion:
    """A finite union of schedules; the empty union is the empty set."""
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        sizes = {p.alphabet_size for p in self.parts}
        if len(sizes) > 1:
            raise IncompatibleAlphabet("union parts use different alphabets")

    def shift(self, i: int = 1) -> "ScheduleUnion":
        return ScheduleUnion(tuple(p.shift(i) for p in self.parts))


EMPTY = ScheduleUnion(())


def subset_parts(K, m: int) -> tuple:
    """Normalize ``None`` / schedule / union into a tuple of schedules."""
    if K is None:
        return (DigitSetSchedule.full(m),)
    if isinstance(K, DigitSetSchedule):
        parts = (K,)
    elif isinstance(K, ScheduleUnion):
        parts = K.parts
    else:
        parts = tuple(K)
    for p in parts:
        if p.alphabet_size != m:
            raise IncompatibleAlphabet(
                f"schedule alphabet {p.alphabet_size} differs from shift alphabet {m}")
    return parts


# -- spectral entropy -----------------------------------------------------

def perron_root(A, rtol: float = 1e-12, max_iter: int = 1_000_000) -> float:
    """Perron eigenvalue of an irreducible nonnegative matrix by power iteration.

    Iterates on ``A + I`` (primitive whenever ``A`` is irreducible) and stops on
    the Collatz-Wielandt bracket ``min(Bx/x) <= rho(B) <= max(Bx/x)``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return 0.0
    B = A + np.eye(n)
    x = np.ones(n)
    for _ in range(max_iter):
        y = B @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        x = y / np.linalg.norm(y)
        if hi - lo <= rtol * hi:
            return float(0.5 * (lo + hi)) - 1.0
    raise RuntimeError("power iteration did not converge")


def strong_components(adj: np.ndarray) -> list[np.ndarray]:
    """Index arrays of the strongly connected components that contain a cycle."""
    n = adj.shape[0]
    if n == 0:
        return []
    k, labels = connected_components(csr_matrix(adj.astype(np.int8)), directed=True,
                                     connection="strong")
    comps = []
    for c in range(k):
        idx = np.flatnonzero(labels == c)
        if adj[np.ix_(idx, idx)].any():
            comps.append(idx)
    return comps


def spectral_radius(adj, rtol: float = 1e-12, warn: bool = True) -> float:
    adj = np.asarray(adj)
    comps = strong_components(adj.astype(bool))
    if not comps:
        return 0.0
    if len(comps) > 1 and warn:
        warnings.warn("transition structure is not irreducible; taking the max over "
                      "irreducible components", NotIrreducibleWarning, stacklevel=3)
    return max(perron_root(adj[np.ix_(c, c)], rtol) for c in comps)


def spectral_entropy(shift: SubshiftSpec) -> float:
    """log of the Perron eigenvalue of the (trimmed) transition graph."""
    rho = spectral_radius(shift.adjacency, warn=True)
    return math.log(rho) if rho > 0 else 0.0


def is_mixing(shift: SubshiftSpec) -> bool:
    """Primitive adjacency (Wielandt bound on the exponent)."""
    A = shift.adjacency.astype(np.int64)
    n = A.shape[0]
    if n == 0:
        return False
    P = (A > 0)
    M = P.copy()
    for _ in range((n - 1) ** 2 + 1):
        if M.all():
            return True
        M = (M.astype(np.int64) @ P.astype(np.int64)) > 0
    return bool(M.all())


# -- sliding block codes ---------------------------------------------------

@dataclass(frozen=True)
class BlockCode:
    """Sliding block code with memory = anticipation = ``window_radius``."""
    window_radius: int
    local_rule: Mapping = field(hash=False)
    source: SubshiftSpec = field(hash=False)
    target: SubshiftSpec = field(hash=False)

    @classmethod
    def from_function(cls, radius: int, fn: Callable[[Word], int],
                      source: SubshiftSpec, target: SubshiftSpec) -> "BlockCode":
        width = 2 * radius + 1
        rule = {w: int(fn(w)) for w in itertools.product(range(source.alphabet_size), repeat=width)}
        return cls(radius, rule, source, target)

    @classmethod
    def identity(cls, shift: SubshiftSpec) -> "BlockCode":
        return cls.from_function(0, lambda w: w[0], shift, shift)

    def __call__(self, window) -> int:
        return self.local_rule[tuple(window)]


def apply_block_code(code: BlockCode, w) -> Word:
    w = as_word(w)
    width = 2 * code.window_radius + 1
    if len(w) < width:
        raise WordTooShort(f"need at least {width} symbols, got {len(w)}")
    if not code.source.is_admissible(w):
        raise InadmissibleWord(f"{w} is not in the source language")
    return tuple(code.local_rule[w[i:i + width]] for i in range(len(w) - width + 1))
