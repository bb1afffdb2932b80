"""Orbit-closure approximations, cycles of intervals and solenoid certificates.

Cycle search works on a finite partition ``p_0 < ... < p_P`` of the interval
that contains every breakpoint of the map (closed under forward orbits when
that closure is finite).  A candidate set is a closed index range
``[p_i, p_j]``; its image is the smallest index range containing the true
image, which is exact when the partition is Markov.  Everything reported is
re-certified afterwards with exact subgraph arithmetic.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import AnalyticIntervalMap, MapSystem, PLGraphMap, image, markov_partition
from .errors import DomainError, NotMarkovError, UnsupportedError
from .metric_graph import Subgraph, are_disjoint, diameter

__all__ = [
    "omega_limit_approx",
    "CycleOfGraphs",
    "detect_cycles",
    "SolenoidCertificate",
    "SolenoidSearch",
    "solenoid_certificate",
    "solenoid_search",
    "DiameterCheck",
    "diameter_average_check",
    "component_count_check",
]


def omega_limit_approx(m: MapSystem, x, N: int, burn: int, eps: float) -> np.ndarray:
    """Greedy ``eps``-net of the orbit tail ``{f^k x : burn <= k < N}`` in orbit order."""
    if not 0 <= burn < N:
        raise DomainError("need 0 <= burn < N")
    if eps <= 0:
        raise DomainError("eps must be positive")
    tail = np.asarray(m.float_orbit(x, N))[burn:]
    # exact repeats (periodic tails) are dropped up front, keeping first occurrences
    _, first = np.unique(tail, axis=0, return_index=True)
    tail = tail[np.sort(first)]
    net = tail[:1]
    for k in range(1, len(tail)):
        p = tail[k : k + 1]
        if m.float_dist(np.broadcast_to(p, net.shape), net).min() > eps:
            net = np.concatenate([net, p])
    return net


# ---------------------------------------------------------------------------
# Cycles of intervals
# ---------------------------------------------------------------------------


@dataclass
class CycleOfGraphs:
    period: int
    components: list  # Subgraph X_0..X_{k-1}
    index_ranges: list = field(default_factory=list)  # partition index ranges, when found by search
    image_ok: list = field(default_factory=list)  # f(X_i) within X_{i+1}, exact
    disjoint_ok: bool = False

    @property
    def certified(self) -> bool:
        return self.disjoint_ok and all(self.image_ok)

    @property
    def union(self) -> Subgraph:
        out = self.components[0]
        for c in self.components[1:]:
            out = out.union(c)
        return out

    def certify(self, m: MapSystem) -> "CycleOfGraphs":
        """Recheck image containments and pairwise disjointness from scratch."""
        k = self.period
        X = self.components
        self.image_ok = [X[(i + 1) % k].contains(image(m, X[i])) for i in range(k)]
        self.disjoint_ok = all(are_disjoint(X[i], X[j]) for i in range(k) for j in range(i + 1, k))
        return self

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "components": [[[str(a), str(b)] for _, a, b in c.arcs] for c in self.components],
            "image_ok": all(self.image_ok),
            "disjoint_ok": self.disjoint_ok,
        }


class _IndexDynamics:
    """Outward-rounded action of ``f`` on closed index ranges of a partition."""

    def __init__(self, m: MapSystem, partition=None):
        if isinstance(m, PLGraphMap):
            if not m.is_interval:
                raise UnsupportedError(
                    f"{m.name}: cycle search needs an interval map; circle maps such as rotations have no "
                    "expanding cell structure (pass an explicit partition for zoo interval maps)"
                )
            if partition is None:
                try:
                    partition = markov_partition(m, max_points=4000)[m._e0]
                    self.exact = True
                except NotMarkovError:
                    partition = sorted({k[0] for k in m.knots()})
                    self.exact = False
            else:
                self.exact = False
            pts = [Fraction(p) for p in partition]
            vals = [m.evaluate(p) for p in pts]
        elif isinstance(m, AnalyticIntervalMap):
            if partition is None:
                raise UnsupportedError(f"{m.name}: analytic maps need an explicit partition containing the critical points")
            pts = sorted(float(p) for p in partition)
            vals = [float(m.evaluate(p)) for p in pts]
            self.exact = False
        else:
            raise UnsupportedError(f"{m.name}: cycle search needs a PL or analytic interval map")
        self.m = m
        self.pts = pts
        self.P = len(pts) - 1
        tol = 0 if isinstance(pts[0], Fraction) else 1e-12
        # snapped outward: lo = last partition point <= value, hi = first point >= value
        self.lo = np.array([max(bisect_right(pts, v + tol) - 1, 0) for v in vals], dtype=np.int64)
        self.hi = np.array([min(bisect_left(pts, v - tol), self.P) for v in vals], dtype=np.int64)

    def image(self, r):
        i, j = r
        return int(self.lo[i : j + 1].min()), int(self.hi[i : j + 1].max())

    def iterate(self, r, k):
        for _ in range(k):
            r = self.image(r)
        return r

    def subgraph(self, r) -> Subgraph:
        m = self.m
        return Subgraph.make(m.graph, [(m._e0, self.pts[r[0]], self.pts[r[1]])])


def _disjoint_ranges(ranges) -> bool:
    s = sorted(ranges)
    return all(a[1] < b[0] for a, b in zip(s, s[1:]))


def detect_cycles(m: MapSystem, k_max: int, partition=None, certify: bool = True) -> list:
    """Maximal cycles of partition intervals with periods ``1..k_max``.

    For each period ``k`` and starting cell ``C`` the set ``K`` is grown to
    the hull of ``K`` and ``f^k(K)`` until stable; the orbit
    ``K, f(K), ..., f^{k-1}(K)`` is kept when its members are pairwise
    disjoint (touching counts as meeting).
    """
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    dyn = _IndexDynamics(m, partition)
    found = []
    for k in range(1, k_max + 1):
        cycles = {}
        for c in range(dyn.P):
            K = (c, c + 1)
            while True:
                i2, j2 = dyn.iterate(K, k)
                nxt = (min(K[0], i2), max(K[1], j2))
                if nxt == K:
                    break
                K = nxt
            if k > 1 and K == (0, dyn.P):
                continue
            orbit = [K]
            for _ in range(k - 1):
                orbit.append(dyn.image(orbit[-1]))
            if not _disjoint_ranges(orbit):
                continue
            key = frozenset(orbit)
            if key not in cycles:
                cycles[key] = orbit
        # keep maximal cycles of this period
        keys = list(cycles)
        for key in keys:
            covered = any(
                other != key and all(any(o[0] <= r[0] and r[1] <= o[1] for o in other) for r in key) for other in keys
            )
            if not covered:
                orbit = cycles[key]
                cyc = CycleOfGraphs(k, [dyn.subgraph(r) for r in orbit], list(orbit))
                if certify:
                    cyc.certify(m)
                    if not cyc.certified:
                        continue
                found.append(cyc)
    return found


# ---------------------------------------------------------------------------
# Solenoids
# ---------------------------------------------------------------------------


@dataclass
class SolenoidCertificate:
    levels: list  # CycleOfGraphs with increasing periods
    orbit_entry: list  # per level, first time the orbit of x enters the cycle
    nesting_ok: bool
    divisibility_ok: bool
    counts_ok: bool

    @property
    def periods(self) -> tuple:
        return tuple(c.period for c in self.levels)

    @property
    def valid(self) -> bool:
        return self.nesting_ok and self.divisibility_ok and self.counts_ok and all(c.certified for c in self.levels)

    def to_dict(self) -> dict:
        return {
            "periods": list(self.periods),
            "orbit_entry": self.orbit_entry,
            "nesting_ok": self.nesting_ok,
            "divisibility_ok": self.divisibility_ok,
            "counts_ok": self.counts_ok,
            "levels": [c.to_dict() for c in self.levels],
        }


@dataclass
class SolenoidSearch:
    certificate: SolenoidCertificate | None
    depth_reached: int
    periods_found: tuple
    reason: str


def _entry_time(m, cyc: CycleOfGraphs, orbit) -> int | None:
    u = cyc.union
    for t, p in enumerate(orbit):
        if u.contains_point(m.coerce(p)):
            return t
    return None


def _nested_counts(child: CycleOfGraphs, parent: CycleOfGraphs):
    """Per parent component, the number of child components inside it; None if some child is not nested."""
    counts = [0] * parent.period
    for x in child.components:
        hits = [i for i, y in enumerate(parent.components) if y.contains(x)]
        if len(hits) != 1:
            return None
        counts[hits[0]] += 1
    return counts


def _check_chain(levels, entries) -> SolenoidCertificate:
    nest = div = cnt = True
    for parent, child in zip(levels, levels[1:]):
        kp, kc = parent.period, child.period
        div &= kc % kp == 0 and kc // kp >= 2
        counts = _nested_counts(child, parent)
        nest &= counts is not None
        cnt &= counts is not None and all(c == kc // kp for c in counts)
    return SolenoidCertificate(list(levels), list(entries), nest, div, cnt)


def solenoid_search(m: MapSystem, x, depth: int, k_max: int | None = None, orbit_len: int | None = None,
                    partition=None) -> SolenoidSearch:
    """Longest chain of nested cycles with multiplying periods (all >= 2) met by the orbit of ``x``."""
    if depth < 2:
        raise DomainError("depth must be at least 2")
    k_max = k_max or 2 ** depth
    cycles = [c for c in detect_cycles(m, k_max, partition) if c.period >= 2]
    orbit_len = orbit_len or 4 * k_max
    orbit = [m.coerce(x)]
    for _ in range(orbit_len - 1):
        orbit.append(m.evaluate(orbit[-1]))
    met = []
    for c in cycles:
        t = _entry_time(m, c, orbit)
        if t is not None:
            met.append((c, t))
    met.sort(key=lambda ct: ct[0].period)

    best: list = []

    def extend(chain):
        nonlocal best
        if len(chain) > len(best):
            best = list(chain)
        if len(best) >= depth:
            return
        last = chain[-1][0] if chain else None
        for c, t in met:
            if last is not None:
                if c.period % last.period or c.period < 2 * last.period:
                    continue
                counts = _nested_counts(c, last)
                if counts is None or any(n != c.period // last.period for n in counts):
                    continue
            chain.append((c, t))
            extend(chain)
            chain.pop()
            if len(best) >= depth:
                return

    extend([])
    periods = tuple(c.period for c, _ in best)
    if len(best) < depth:
        return SolenoidSearch(None, len(best), periods,
                              f"longest nested chain met by the orbit has {len(best)} level(s) with periods {periods}")
    chain = best[:depth]
    cert = _check_chain([c for c, _ in chain], [t for _, t in chain])
    return SolenoidSearch(cert, depth, periods, "certified" if cert.valid else "chain failed exact recheck")


def solenoid_certificate(m: MapSystem, x, depth: int, **kw) -> SolenoidCertificate | None:
    return solenoid_search(m, x, depth, **kw).certificate


# ---------------------------------------------------------------------------
# Averaged diameters along a cycle
# ---------------------------------------------------------------------------


@dataclass
class DiameterCheck:
    lhs: float
    rhs: float
    N: int
    eps: float
    period: int
    total_length: object
    large_components: int  # |{i : diam(X_i) >= eps}|
    count_bound: float  # total_length / eps

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def count_ok(self) -> bool:
        return self.large_components <= self.count_bound


def component_count_check(m: MapSystem, cyc: CycleOfGraphs, eps):
    """``(#components with diameter >= eps, total_length / eps)``, exact for rational eps."""
    eps = Fraction(eps) if not isinstance(eps, float) else Fraction(str(eps))
    big = sum(1 for X in cyc.components if diameter(m.graph, X) >= eps)
    return big, m.graph.total_length / eps


def diameter_average_check(m: MapSystem, cyc: CycleOfGraphs, N: int, eps) -> DiameterCheck:
    """Compare ``(1/N) sum_{k<N} diam f^k(X_0)`` with ``eps + (N/p + 1)(M/eps)/N``.

    Images are propagated exactly; once a set repeats, the remaining terms
    are filled in from the detected cycle.  For graphs of diameter above 1
    the second term is scaled by the graph diameter.
    """
    k = cyc.period
    if N < k:
        raise DomainError("N must be at least the period")
    g = m.graph
    seen = {}
    diams = []
    S = cyc.components[0]
    while len(diams) < N:
        key = S.arcs
        if key in seen:
            start = seen[key]
            loop = diams[start:]
            while len(diams) < N:
                diams.extend(loop[: N - len(diams)])
            break
        seen[key] = len(diams)
        diams.append(diameter(g, S))
        S = image(m, S)
    lhs = float(sum(diams, Fraction(0)) / N)
    M = g.total_length
    epsf = float(eps)
    gdiam = max(1.0, float(diameter(g, Subgraph.full(g))))
    rhs = epsf + (N / k + 1) * (float(M) / epsf) / N * gdiam
    big, bound = component_count_check(m, cyc, eps)
    return DiameterCheck(lhs, rhs, N, epsf, k, M, big, float(bound))
