"""Entropy estimators for interval and Markov systems.

Lap counts of ``f^n`` are propagated symbolically: each lap of ``f^n`` is
represented only by its image interval, and a lap whose image contains ``j``
turning points of ``f`` in its interior splits into ``j + 1`` laps of
``f^(n+1)``.  Identical images are merged with big-integer multiplicities,
so the counts are exact for PL maps with rational data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import AnalyticIntervalMap, MapSystem, PLGraphMap, restricted_preimage
from .errors import DomainError, UnsupportedError
from .metric_graph import Subgraph

__all__ = [
    "EntropyEstimate",
    "turning_points",
    "lap_counts",
    "lap_entropy",
    "markov_entropy",
    "markov_entropy_report",
    "path_count_entropy",
    "Lap",
    "laps_of_iterate",
    "Horseshoe",
    "HorseshoeSearch",
    "find_horseshoe",
    "horseshoe_search",
    "sequence_word_count",
    "sequence_entropy_markov",
]


@dataclass
class EntropyEstimate:
    method: str
    estimate: float
    trace: list = field(default_factory=list)  # log(l_n)/n or power-iteration values
    lap_counts: list = field(default_factory=list)  # l_1, l_2, ...
    check: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Laps
# ---------------------------------------------------------------------------


def _require_interval(m: MapSystem):
    if not m.is_interval or not isinstance(m, (PLGraphMap, AnalyticIntervalMap)):
        raise UnsupportedError(f"{m.name}: lap analysis needs a piecewise-monotone interval map")


def turning_points(m: MapSystem) -> list:
    """Interior points where ``f`` switches between non-decreasing and non-increasing."""
    _require_interval(m)
    if isinstance(m, AnalyticIntervalMap):
        return [br.hi for br in m.branches()[:-1]]
    knots = m.knots()
    out = []
    last = 0
    for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
        s = (y1 > y0) - (y1 < y0)
        if s == 0:
            continue
        if last and s != last:
            out.append(x0)
        last = s
    return out


def _fval(m):
    if isinstance(m, AnalyticIntervalMap):
        return lambda x: min(max(float(m.f(x)), 0.0), 1.0)
    return m.evaluate


def lap_counts(m: MapSystem, n_max: int) -> list:
    """Exact lap numbers ``[l_1, ..., l_{n_max}]`` of the iterates."""
    _require_interval(m)
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    f = _fval(m)
    tps = turning_points(m)
    ends = [0 * m._L] + tps + [m._L]
    images = {}
    for a, b in zip(ends, ends[1:]):
        fa, fb = f(a), f(b)
        key = (min(fa, fb), max(fa, fb))
        images[key] = images.get(key, 0) + 1
    counts = [sum(images.values())]
    import bisect

    for _ in range(n_max - 1):
        nxt = {}
        for (u, v), c in images.items():
            i = bisect.bisect_right(tps, u)
            j = bisect.bisect_left(tps, v)
            cuts = [u] + tps[i:j] + [v]
            fv = [f(x) for x in cuts]
            for y0, y1 in zip(fv, fv[1:]) if len(cuts) > 1 else ():
                key = (min(y0, y1), max(y0, y1))
                nxt[key] = nxt.get(key, 0) + c
            if u == v:
                y = fv[0]
                nxt[(y, y)] = nxt.get((y, y), 0) + c
        images = nxt
        counts.append(sum(images.values()))
    return counts


def lap_entropy(m: MapSystem, n_max: int) -> EntropyEstimate:
    """``log(l_{n+1} / l_n)`` at ``n = n_max``, with the trace ``log(l_n)/n``."""
    counts = lap_counts(m, n_max + 1)
    trace = [math.log(c) / (k + 1) for k, c in enumerate(counts)]
    est = math.log(counts[n_max]) - math.log(counts[n_max - 1])
    return EntropyEstimate("lap", max(est, 0.0), trace, counts)


# ---------------------------------------------------------------------------
# Markov matrices
# ---------------------------------------------------------------------------


def _check_matrix(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DomainError("transition matrix must be square and non-empty")
    if (M < 0).any():
        raise DomainError("transition matrix must be nonnegative")
    return M


def path_count_entropy(M, n: int = 30) -> float:
    """``(1/n) log`` of the number of admissible words of length ``n``, in exact integers.

    A word of length n visits n states, so it is counted by ``1' M^(n-1) 1``.
    """
    M = _check_matrix(M)
    A = M.astype(object)
    v = np.ones(M.shape[0], dtype=object)
    for _ in range(n - 1):
        v = A.dot(v)
    total = int(sum(v))
    return math.log(total) / n if total > 0 else -math.inf


def markov_entropy_report(M, tol: float = 1e-10, max_iter: int = 1_000_000, check_n: int = 30) -> EntropyEstimate:
    """Log spectral radius by power iteration on ``M + I`` from the all-ones vector."""
    M = _check_matrix(M).astype(float)
    if not M.any():
        return EntropyEstimate("markov", -math.inf, [], check={"paths_n": check_n, "path_entropy": -math.inf})
    B = M + np.eye(M.shape[0])
    v = np.ones(M.shape[0])
    lam_prev = None
    trace = []
    converged = False
    for _ in range(max_iter):
        w = B @ v
        lam = float(np.linalg.norm(w) / np.linalg.norm(v))
        v = w / np.linalg.norm(w)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * lam:
            converged = True
            trace.append(lam - 1.0)
            break
        lam_prev = lam
        if len(trace) < 64:
            trace.append(lam - 1.0)
    rho = lam - 1.0
    method = "markov"
    if not converged:
        rho = float(max(abs(np.linalg.eigvals(M))))
        method = "markov-eig"
    est = math.log(rho) if rho > 1e-12 else -math.inf
    path = path_count_entropy(M.astype(np.int64), check_n)
    check = {"paths_n": check_n, "path_entropy": path, "difference": abs(path - est) if est > -math.inf else None}
    return EntropyEstimate(method, est, trace, check=check)


def markov_entropy(M) -> float:
    return markov_entropy_report(M).estimate


# ---------------------------------------------------------------------------
# Horseshoes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lap:
    """Maximal monotone piece ``[a, b]`` of ``f^n`` with endpoint values."""

    a: object
    b: object
    fa: object
    fb: object

    @property
    def image(self):
        return (min(self.fa, self.fb), max(self.fa, self.fb))


def _interval(m, a, b) -> Subgraph:
    return Subgraph.make(m.graph, [(m._e0, a, b)])


def _point_preimage_in(m, lap: Lap, t, n):
    pre = restricted_preimage(m, _interval(m, lap.a, lap.b), _interval(m, t, t), n)
    if pre.is_empty:
        # float maps: fall back to the lap endpoint nearest in value
        return lap.a if abs(lap.fa - t) <= abs(lap.fb - t) else lap.b
    arcs = pre.arcs
    return (arcs[0][1] + arcs[-1][2]) / 2 if isinstance(arcs[0][1], float) else arcs[0][1]


def laps_of_iterate(m: MapSystem, n: int, cap: int = 5000) -> list:
    """Explicit laps of ``f^n`` (source intervals and endpoint values)."""
    _require_interval(m)
    f = _fval(m)
    tps = turning_points(m)
    ends = [0 * m._L] + tps + [m._L]
    laps = [Lap(a, b, f(a), f(b)) for a, b in zip(ends, ends[1:])]
    for k in range(1, n):
        nxt = []
        for lap in laps:
            u, v = lap.image
            inner = [t for t in tps if u < t < v]
            if lap.fa > lap.fb:
                inner = inner[::-1]
            pts = [lap.a] + [_point_preimage_in(m, lap, t, k) for t in inner] + [lap.b]
            vals = [lap.fa] + inner + [lap.fb]
            for (p, q), (yp, yq) in zip(zip(pts, pts[1:]), zip(vals, vals[1:])):
                nxt.append(Lap(p, q, f(yp), f(yq)))
            if len(nxt) > cap:
                raise DomainError(f"more than {cap} laps at n={k + 1}")
        laps = nxt
    return laps


@dataclass(frozen=True)
class Horseshoe:
    n: int
    I: tuple
    J1: tuple
    J2: tuple
    certified: bool

    def as_dict(self):
        s = lambda t: [str(x) if isinstance(x, Fraction) else x for x in t]
        return {"n": self.n, "I": s(self.I), "J1": s(self.J1), "J2": s(self.J2), "certified": self.certified}


@dataclass
class HorseshoeSearch:
    horseshoe: Horseshoe | None
    n_searched: int
    reason: str

    @property
    def found(self):
        return self.horseshoe is not None


def _is_injective(m: PLGraphMap) -> bool:
    from .dynamics import image

    full = Subgraph.full(m.graph)
    total = sum(m._path_len, Fraction(0))
    return total == m.graph.total_length and image(m, full) == full


def _iterate(m, x, n):
    f = _fval(m)
    for _ in range(n):
        x = f(x)
    return x


def horseshoe_search(m: MapSystem, n_max: int, shrink=Fraction(9, 10), lap_cap: int = 5000) -> HorseshoeSearch:
    """Search pairs of laps of ``f^n`` (n <= n_max) for a strong 2-horseshoe.

    For each pair whose images overlap in ``K``, take ``I`` = ``K`` shrunk
    about its centre, pull ``I`` back into both laps, and accept when both
    pullbacks sit inside the interior of ``I`` and are disjoint.  Covering is
    re-verified by evaluating ``f^n`` at the pullback endpoints.
    """
    if isinstance(m, PLGraphMap) and not m.is_interval:
        if _is_injective(m):
            return HorseshoeSearch(None, 0, "map is injective off a finite set; no horseshoe exists")
        raise UnsupportedError(f"{m.name}: horseshoe search needs an interval map")
    _require_interval(m)
    exact = isinstance(m, PLGraphMap)
    if not exact:
        shrink = float(shrink)
    tol = 0 if exact else 1e-9
    for n in range(1, n_max + 1):
        try:
            laps = laps_of_iterate(m, n, cap=lap_cap)
        except DomainError:
            return HorseshoeSearch(None, n - 1, f"lap cap exceeded at n={n}; search stopped")
        for i in range(len(laps)):
            u1, v1 = laps[i].image
            if u1 == v1:
                continue
            for j in range(i + 1, len(laps)):
                u2, v2 = laps[j].image
                lo, hi = max(u1, u2), min(v1, v2)
                if not lo < hi:
                    continue
                c, half = (lo + hi) / 2, (hi - lo) * shrink / 2
                I = (c - half, c + half)
                # each pullback lies in its lap, so both laps must reach into Int(I)
                if not (laps[i].a < I[1] and laps[i].b > I[0] and laps[j].a < I[1] and laps[j].b > I[0]):
                    continue
                Iset = _interval(m, *I)
                Js = []
                for lap in (laps[i], laps[j]):
                    pre = restricted_preimage(m, _interval(m, lap.a, lap.b), Iset, n)
                    if pre.is_empty:
                        break
                    Js.append((pre.arcs[0][1], pre.arcs[-1][2]))
                if len(Js) < 2:
                    continue
                (p1, q1), (p2, q2) = sorted(Js)
                if not (I[0] < p1 and q2 < I[1] and q1 < p2):
                    continue
                ok = True
                for p, q in Js:
                    ys = sorted((_iterate(m, p, n), _iterate(m, q, n)))
                    if not (ys[0] <= I[0] + tol and ys[1] >= I[1] - tol):
                        ok = False
                if ok:
                    hs = Horseshoe(n, I, (p1, q1), (p2, q2), certified=exact)
                    return HorseshoeSearch(hs, n, "found")
    return HorseshoeSearch(None, n_max, f"no horseshoe among laps of f^n for n <= {n_max}; this is not a proof of absence")


def find_horseshoe(m: MapSystem, n_max: int) -> Horseshoe | None:
    return horseshoe_search(m, n_max).horseshoe


# ---------------------------------------------------------------------------
# Sequence entropy of Markov shifts
# ---------------------------------------------------------------------------


def _core(M: np.ndarray) -> np.ndarray:
    """Indices of states lying on a bi-infinite path."""
    alive = np.ones(M.shape[0], dtype=bool)
    while True:
        sub = M[np.ix_(alive, alive)] > 0
        keep = sub.any(axis=0) & sub.any(axis=1)
        if keep.all():
            return np.nonzero(alive)[0]
        idx = np.nonzero(alive)[0]
        alive[idx[~keep]] = False
        if not alive.any():
            return idx[:0]


def _bool_power(B: np.ndarray, k: int) -> np.ndarray:
    R = np.eye(B.shape[0], dtype=bool)
    P = B.copy()
    while k:
        if k & 1:
            R = (R.astype(np.int64) @ P.astype(np.int64)) > 0
        P = (P.astype(np.int64) @ P.astype(np.int64)) > 0
        k >>= 1
    return R


def sequence_word_count(M, A, n: int) -> int:
    """Number of distinct state words seen at times ``a_1 < ... < a_n`` on bi-infinite paths."""
    M = _check_matrix(M)
    A = [int(a) for a in list(A)[:n]]
    if len(A) < n:
        raise DomainError(f"sequence has fewer than {n} terms")
    if any(b <= a for a, b in zip(A, A[1:])):
        raise DomainError("sequence must be strictly increasing")
    core = _core(M)
    if core.size == 0:
        return 0
    B = M[np.ix_(core, core)] > 0
    v = np.ones(core.size, dtype=object)
    for a, b in reversed(list(zip(A, A[1:]))):
        G = _bool_power(B, b - a).astype(np.int64).astype(object)
        v = G.dot(v)
    return int(sum(v))


def sequence_entropy_markov(M, A, n: int) -> float:
    """``(1/n) log`` of :func:`sequence_word_count`."""
    c = sequence_word_count(M, A, n)
    return math.log(c) / n if c > 0 else -math.inf
