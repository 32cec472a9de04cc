"""Position-dependent automaton for a subshift intersected with schedule sets.

For a shift X and a finite union K = K_1 u ... u K_c of schedules, the engine
tracks a graph state (the last ``s`` symbols) together with a bitmask of the
components whose constraints the word read so far still satisfies. Two
greatest fixed points make every counted word realizable by a point of K:

* ``fwd(i)[c, t]``: state t ending at coordinate i extends to the right inside K_c;
* ``bwd(i)[c, t]``: state t ending at coordinate i extends to the left inside K_c.

Both are eventually periodic in i, so they are computed exactly on one period
and then unrolled towards the preperiod.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DepthOverflow
from .symbolic import DigitSetSchedule, SubshiftSpec, subset_parts

WINDOW_LIMIT = 1 << 16
ENUM_LIMIT = 2_000_000


class Language:
    """Realized-word machinery for ``shift`` restricted to ``subset``.

    ``subset`` may be ``None`` (the whole shift), a schedule, a
    :class:`~symentropy.symbolic.ScheduleUnion` or a sequence of schedules.
    """

    def __init__(self, shift: SubshiftSpec, subset=None):
        self.shift = shift
        self.parts = subset_parts(subset, shift.alphabet_size)
        self.c = len(self.parts)
        self.s = shift.state_length
        self.adj = shift.adjacency
        self.adj_i = shift.adjacency.astype(np.int64)
        self.nst = shift.n_states
        self.empty_shift = self.nst == 0 or self.c == 0
        if self.c:
            self.I0 = max(p.p for p in self.parts) + self.s - 1
            self.Q = math.lcm(*(p.q for p in self.parts))
            lefts = [p.left_periodic_start() for p in self.parts]
            self.J0 = -max(c0 for c0, _ in lefts)
            self.QL = math.lcm(*(ql for _, ql in lefts))
        self._fwd = {}
        self._bwd = {}
        self._fwd_period = None
        self._bwd_period = None
        self._ok_cache = {}
        self._bits = 1 << np.arange(max(self.c, 1), dtype=np.int64)

    # -- local consistency --------------------------------------------------
    def _canon(self, i: int):
        if i >= self.I0:
            return ("f", (i - self.I0) % self.Q)
        if i <= self.J0:
            return ("b", i % self.QL)
        return ("m", i)

    def ok(self, i: int) -> np.ndarray:
        """bool [c, n_states]: state ending at coordinate i obeys component c."""
        key = self._canon(i)
        hit = self._ok_cache.get(key)
        if hit is not None:
            return hit
        m = self.shift.alphabet_size
        out = np.ones((self.c, self.nst), dtype=bool)
        for ci, part in enumerate(self.parts):
            for u in range(self.s):
                mask = np.zeros(m, dtype=bool)
                mask[list(part.allowed(i - self.s + 1 + u))] = True
                out[ci] &= mask[self.shift.state_array[:, u]]
        out.setflags(write=False)
        self._ok_cache[key] = out
        return out

    def _succ(self, X):
        return (X.astype(np.int64) @ self.adj_i.T) > 0

    def _pred(self, X):
        return (X.astype(np.int64) @ self.adj_i) > 0

    # -- alive sets -----------------------------------------------------------
    def fwd(self, i: int) -> np.ndarray:
        if self._fwd_period is None:
            X = [self.ok(self.I0 + r).copy() for r in range(self.Q)]
            changed = True
            while changed:
                changed = False
                for r in reversed(range(self.Q)):
                    new = X[r] & self._succ(X[(r + 1) % self.Q])
                    if not np.array_equal(new, X[r]):
                        X[r] = new
                        changed = True
            self._fwd_period = X
        if i >= self.I0:
            return self._fwd_period[(i - self.I0) % self.Q]
        hit = self._fwd.get(i)
        if hit is not None:
            return hit
        j = i + 1
        while j < self.I0 and j not in self._fwd:
            j += 1
        nxt = self.fwd(j)
        for t in range(j - 1, i - 1, -1):
            nxt = self.ok(t) & self._succ(nxt)
            self._fwd[t] = nxt
        return nxt

    def bwd(self, i: int) -> np.ndarray:
        if self._bwd_period is None:
            base = self.J0 - self.QL + 1
            Y = {r: self.ok(base + r).copy() for r in range(self.QL)}
            changed = True
            while changed:
                changed = False
                for r in range(self.QL):
                    new = Y[r] & self._pred(Y[(r - 1) % self.QL])
                    if not np.array_equal(new, Y[r]):
                        Y[r] = new
                        changed = True
            self._bwd_period = {(base + r) % self.QL: Y[r] for r in range(self.QL)}
        if i <= self.J0:
            return self._bwd_period[i % self.QL]
        hit = self._bwd.get(i)
        if hit is not None:
            return hit
        j = i - 1
        while j > self.J0 and j not in self._bwd:
            j -= 1
        prv = self.bwd(j)
        for t in range(j + 1, i + 1):
            prv = self.ok(t) & self._pred(prv)
            self._bwd[t] = prv
        return prv

    def masks(self, X: np.ndarray) -> np.ndarray:
        """Collapse a bool [c, n_states] table into per-state component bitmasks."""
        return (X.astype(np.int64) * self._bits[: self.c, None]).sum(axis=0)

    @property
    def is_empty(self) -> bool:
        if self.empty_shift:
            return True
        return not (self.fwd(0) & self.bwd(0)).any()

    # -- counting -----------------------------------------------------------
    def start_masks(self, a: int) -> np.ndarray:
        """Component masks of states covering coordinates ``a..a+s-1``."""
        e = a + self.s - 1
        return self.masks(self.fwd(e) & self.bwd(e))

    def _short_count(self, a: int, b: int) -> int:
        msk = self.start_masks(a)
        L = b - a + 1
        return len({self.shift.states[t][:L] for t in np.flatnonzero(msk)})

    def counts_along(self, a: int, ends, exact: bool = True) -> dict:
        """Realized word counts on ``[a, b]`` for every ``b`` in ``ends``.

        Exact integers when ``exact``; otherwise natural logs (``-inf`` for 0).
        One forward sweep serves all requested ends.
        """
        ends = sorted(set(int(b) for b in ends))
        out = {}
        if self.empty_shift:
            return {b: (0 if exact else -math.inf) for b in ends}
        if ends and ends[-1] - a + 1 > WINDOW_LIMIT:
            raise DepthOverflow(f"window of length {ends[-1] - a + 1} exceeds {WINDOW_LIMIT}")
        for b in ends:
            if b < a:
                out[b] = 1 if exact else 0.0
            elif b - a + 1 < self.s:
                n = self._short_count(a, b)
                out[b] = n if exact else (math.log(n) if n else -math.inf)
        todo = [b for b in ends if b - a + 1 >= self.s]
        if not todo:
            return out
        start = a + self.s - 1
        msk = self.start_masks(a)
        dtype = object if exact else float
        # state vectors grouped by component mask
        groups = {}
        for mk in np.unique(msk[msk > 0]):
            v = np.zeros(self.nst, dtype=dtype)
            v[msk == mk] = 1
            groups[int(mk)] = v
        logscale = 0.0
        pos = start
        k = 0
        while True:
            if pos == todo[k]:
                tot = sum((v.sum() for v in groups.values()), 0 if exact else 0.0)
                if exact:
                    out[pos] = int(tot)
                else:
                    out[pos] = math.log(tot) + logscale if tot > 0 else -math.inf
                k += 1
                if k == len(todo):
                    return out
            pos += 1
            tmask = self.masks(self.fwd(pos))
            new = {}
            for mk, v in groups.items():
                w = v @ self.adj_i if exact else v @ self.adj
                nm = mk & tmask
                for mk2 in np.unique(nm[nm > 0]):
                    sel = nm == mk2
                    acc = new.get(int(mk2))
                    part = np.where(sel, w, 0)
                    if exact:
                        part = part.astype(object)
                    new[int(mk2)] = part if acc is None else acc + part
            groups = new
            if not groups:
                for b in todo[k:]:
                    out[b] = 0 if exact else -math.inf
                return out
            if not exact:
                top = max(float(v.max()) for v in groups.values())
                if top > 1e100 or top < 1e-100:
                    logscale += math.log(top)
                    groups = {mk: v / top for mk, v in groups.items()}

    def count_window(self, a: int, b: int) -> int:
        return self.counts_along(a, [b], exact=True)[b]

    def log_count_window(self, a: int, b: int) -> float:
        return self.counts_along(a, [b], exact=False)[b]

    # -- enumeration ----------------------------------------------------------
    def walk(self, a: int, b: int, limit: int = ENUM_LIMIT):
        """Realized words on ``[a, b]`` with their final (state, component mask).

        Requires ``b - a + 1 >= s``. Distinct masks for the same word are merged.
        """
        if self.empty_shift:
            return []
        L = b - a + 1
        if L < self.s:
            raise ValueError("window shorter than the state length")
        found = {}
        msk0 = self.start_masks(a)
        stack = [(self.shift.states[t], int(t), int(msk0[t])) for t in np.flatnonzero(msk0)]
        while stack:
            w, t, mk = stack.pop()
            if len(w) == L:
                key = (w, t)
                found[key] = found.get(key, 0) | mk
                if len(found) > limit:
                    raise DepthOverflow(f"more than {limit} words on window [{a}, {b}]")
                continue
            for t2, nm in self.children(a + len(w), t, mk):
                stack.append((w + (self.shift.states[t2][-1],), t2, nm))
        return sorted((w, t, mk) for (w, t), mk in found.items())

    def words(self, a: int, b: int, limit: int = ENUM_LIMIT):
        """All realized words on ``[a, b]`` (sorted). Brute force; small windows only."""
        if self.empty_shift:
            return []
        L = b - a + 1
        if L <= 0:
            return [()]
        if L < self.s:
            msk = self.start_masks(a)
            return sorted({self.shift.states[t][:L] for t in np.flatnonzero(msk)})
        return [w for w, _, _ in self.walk(a, b, limit)]

    # -- forced continuations -------------------------------------------------
    def children(self, pos: int, t: int, mk: int):
        """Realized successors at coordinate ``pos`` of state ``t`` (ending at pos-1)."""
        tmask = self.masks(self.fwd(pos))
        res = []
        for t2 in np.flatnonzero(self.adj[t]):
            nm = mk & int(tmask[t2])
            if nm:
                res.append((int(t2), nm))
        return res

    def forced_run(self, pos: int, t: int, mk: int) -> float:
        """Number of consecutive coordinates from ``pos`` on whose symbol is forced.

        Returns ``math.inf`` when the forced chain never branches (detected by a
        repeated (phase, state, mask) once inside the periodic regime).
        """
        run = 0
        seen = set()
        while True:
            ch = self.children(pos, t, mk)
            if len(ch) != 1:
                return run
            if pos >= self.I0:
                key = ((pos - self.I0) % self.Q, t, mk)
                if key in seen:
                    return math.inf
                seen.add(key)
            t, mk = ch[0]
            pos += 1
            run += 1


def count_words(shift: SubshiftSpec, constraint=None, n: int = 1) -> int:
    """Exact number of realized ``n``-words on coordinates ``0..n-1``.

    With a ``constraint`` schedule (or union) only words extending to a point of
    ``shift`` inside the constraint are counted. An empty intersection gives 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if constraint is not None:
        subset_parts(constraint, shift.alphabet_size)
    return Language(shift, constraint).count_window(0, n - 1)


def log_count_words(shift: SubshiftSpec, constraint=None, n: int = 1) -> float:
    """Natural log of :func:`count_words`, computed in scaled floating point."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Language(shift, constraint).log_count_window(0, n - 1)


def realized_words(shift: SubshiftSpec, constraint=None, a: int = 0, b: int = 0):
    return Language(shift, constraint).words(a, b)


def is_empty(shift: SubshiftSpec, K) -> bool:
    return Language(shift, K).is_empty


def period_transfer(shift: SubshiftSpec, K: DigitSetSchedule) -> tuple[np.ndarray, int]:
    """Product of masked transition matrices over one period of ``K`` (after its
    preperiod), and the period length."""
    lang = Language(shift, K)
    Q = lang.Q
    P = np.eye(shift.n_states)
    for r in range(Q):
        pos = lang.I0 + 1 + r
        D = np.diag(lang.fwd(pos)[0].astype(float))
        P = P @ (shift.adjacency.astype(float) @ D)
    return P, Q


def schedule_entropy(shift: SubshiftSpec, K: DigitSetSchedule) -> float:
    """Exact growth rate of realized words of a single schedule set.

    ``(1/Q) log rho(P)`` for the one-period transfer product ``P`` restricted to
    states reachable at the start of the periodic regime.
    """
    from .symbolic import spectral_radius
    lang = Language(shift, K)
    if lang.is_empty:
        return 0.0
    P, Q = period_transfer(shift, K)
    # reachable states at coordinate I0
    reach = _reachable_at(lang, lang.I0)
    R = np.zeros_like(reach)
    frontier = reach.copy()
    while frontier.any():
        R |= frontier
        frontier = ((frontier.astype(float) @ P) > 0) & ~R
    idx = np.flatnonzero(R)
    if idx.size == 0:
        return 0.0
    sub = P[np.ix_(idx, idx)]
    rho = spectral_radius(sub, warn=False)
    return math.log(rho) / Q if rho > 0 else 0.0


def _reachable_at(lang: Language, pos: int) -> np.ndarray:
    """States realized at coordinate ``pos`` by points of the (single) schedule."""
    e = lang.s - 1
    cur = (lang.fwd(e) & lang.bwd(e))[0]
    for i in range(e + 1, pos + 1):
        cur = ((cur.astype(np.int64) @ lang.adj_i) > 0) & lang.fwd(i)[0]
    return cur
