"""Scrambled tuples, proximal-relation transitivity and independence sets.

Independence is decided exactly for PL maps.  For times ``j_0 < ... < j_m``
and symbols ``s``, the pattern set ``{x : f^{j_i} x in A_{s_i}}`` is nonempty
iff the forward chain ``D_0 = f^{j_0}(G) & A_{s_0}``,
``D_i = f^{j_i - j_{i-1}}(D_{i-1}) & A_{s_i}`` ends nonempty.  Witness points
are recovered backwards through restricted preimages and re-checked by
forward evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rng import rng_for
from .birkhoff import tuple_statistics
from .dynamics import MapSystem, PLGraphMap, image, orbit
from .errors import DomainError, UnsupportedError
from .metric_graph import GraphPoint, Subgraph, are_disjoint, ball

__all__ = [
    "TupleReport",
    "find_scrambled_tuples",
    "periodic_points",
    "ProxWitness",
    "prox_transitivity_test",
    "IndependenceResult",
    "independence_set_search",
    "check_independence",
    "IndependenceTrend",
    "classify_IE_IN_IT",
]


@dataclass
class TupleReport:
    points: tuple
    N: int
    closeness: float  # window min of the max pairwise distance
    separation: float  # window max of the min pairwise distance
    eps_prox: float
    eps_dist: float

    @property
    def scrambled(self) -> bool:
        return self.closeness < self.eps_prox and self.separation > self.eps_dist


def find_scrambled_tuples(m: MapSystem, n: int, samples: int, N: int, eps_prox: float = 0.01,
                          eps_dist: float = 0.1, seed: int = 0) -> list:
    """Scrambled-like ``n``-tuples among ``samples`` random tuples, by decreasing separation."""
    if n < 2:
        raise DomainError("tuple size must be at least 2")
    rng = rng_for(seed, "scrambled")
    S = m.sample_states(rng, samples * n)
    S = S.reshape((samples, n) + S.shape[1:])
    st = tuple_statistics(m, S, N)
    hits = np.nonzero((st.closeness < eps_prox) & (st.separation > eps_dist))[0]
    out = [TupleReport(tuple(S[t]), N, float(st.closeness[t]), float(st.separation[t]), eps_prox, eps_dist)
           for t in hits]
    out.sort(key=lambda r: -r.separation)
    return out


# ---------------------------------------------------------------------------
# Periodic points of PL interval maps
# ---------------------------------------------------------------------------


def _affine_pieces(m: PLGraphMap, p: int) -> list:
    """Pieces ``(a, b, f^p(a), f^p(b))`` on which ``f^p`` is affine."""
    knots = m.knots()
    xs = [x for x, _ in knots]
    pieces = [(a, b, ya, yb) for (a, ya), (b, yb) in zip(knots, knots[1:])]
    for _ in range(p - 1):
        nxt = []
        for a, b, ya, yb in pieces:
            if ya == yb:
                y = m.evaluate(ya)
                nxt.append((a, b, y, y))
                continue
            lo, hi = min(ya, yb), max(ya, yb)
            cuts = [c for c in xs if lo < c < hi]
            if ya > yb:
                cuts.reverse()
            src = [a] + [a + (c - ya) * (b - a) / (yb - ya) for c in cuts] + [b]
            vals = [ya] + cuts + [yb]
            for s0, s1, v0, v1 in zip(src, src[1:], vals, vals[1:]):
                nxt.append((s0, s1, m.evaluate(v0), m.evaluate(v1)))
        pieces = nxt
    return pieces


def periodic_points(m: MapSystem, max_period: int = 4, limit: int = 64) -> list:
    """Exact periodic orbits of period ``<= max_period`` of a PL interval map.

    Returns a list of orbits (tuples of Fractions), one per cycle.
    """
    if not (isinstance(m, PLGraphMap) and m.is_interval):
        return []
    seen = set()
    cycles = []
    for p in range(1, max_period + 1):
        for a, b, ya, yb in _affine_pieces(m, p):
            s = (yb - ya) / (b - a)
            if s == 1:
                continue
            x = (ya - s * a) / (1 - s)
            if not a <= x <= b or x in seen:
                continue
            orb = [x]
            while len(orb) <= p:
                y = m.evaluate(orb[-1])
                if y == x:
                    break
                orb.append(y)
            if len(orb) > p or m.evaluate(orb[-1]) != x:
                continue
            seen.update(orb)
            cycles.append(tuple(orb))
            if len(cycles) >= limit:
                return cycles
    return cycles


@dataclass
class ProxWitness:
    x: object
    y: object
    z: object
    liminf_xy: float
    liminf_yz: float
    liminf_xz: float


def prox_transitivity_test(m: MapSystem, triple_samples: int, N: int, eps: float = 0.01, seed: int = 0,
                           periodic_share: float = 0.5, max_period: int = 4) -> list:
    """Triples with ``(x,y)`` and ``(y,z)`` proximal-like but ``(x,z)`` not.

    Proximal-like means the window minimum of the distance is below ``eps``;
    "not" means it exceeds ``10 eps``.  For PL interval maps each coordinate
    is, with probability ``periodic_share``, an exact periodic point of period
    at most ``max_period``; such coordinates follow their exact cycle.
    """
    rng = rng_for(seed, "proxtrans")
    S = m.sample_states(rng, triple_samples * 3)
    S = S.reshape((triple_samples, 3) + S.shape[1:])
    cycles = periodic_points(m, max_period) if m.kernel is not None else []
    pins = None
    if cycles:
        starts = [(ci, r) for ci, c in enumerate(cycles) for r in range(len(c))]
        maxp = max(len(c) for c in cycles)
        table = np.zeros((len(starts), maxp))
        period = np.zeros(len(starts), dtype=np.int64)
        for row, (ci, r) in enumerate(starts):
            c = cycles[ci]
            rot = c[r:] + c[:r]
            table[row, : len(c)] = [float(v) for v in rot]
            period[row] = len(c)
        pick = rng.random((triple_samples, 3)) < periodic_share
        which = rng.integers(0, len(starts), (triple_samples, 3))
        pin_idx = np.where(pick, which, -1).astype(np.int64)
        S = np.where(pick, table[np.maximum(pin_idx, 0), 0], S)
        pins = (pin_idx, table, period)
    st = tuple_statistics(m, S, N, pins=pins)
    lo = st.wmin  # pairs (0,1), (0,2), (1,2)
    hits = np.nonzero((lo[:, 0] < eps) & (lo[:, 2] < eps) & (lo[:, 1] > 10 * eps))[0]
    out = []
    for t in hits:
        pts = []
        for i in range(3):
            if pins is not None and pins[0][t, i] >= 0:
                ci, r = starts[pins[0][t, i]]
                pts.append(cycles[ci][r])
            else:
                pts.append(S[t, i])
        out.append(ProxWitness(*pts, float(lo[t, 0]), float(lo[t, 2]), float(lo[t, 1])))
    return out


# ---------------------------------------------------------------------------
# Independence sets
# ---------------------------------------------------------------------------


@dataclass
class IndependenceResult:
    arcs: list
    J: tuple
    verified: bool
    patterns_checked: int
    witnesses: dict = field(default_factory=dict)  # pattern -> witness point
    witnesses_ok: bool = False
    first_failure: tuple | None = None  # (time, pattern) of the first rejected extension
    budget_exhausted: bool = False
    horizon: int = 0

    @property
    def size(self) -> int:
        return len(self.J)


class _Leaf:
    __slots__ = ("chain", "cur", "cur_time")

    def __init__(self, chain, cur, cur_time):
        self.chain = chain  # [(time, symbol, D)]
        self.cur = cur  # f^(cur_time - last time)(D_last)
        self.cur_time = cur_time


def _forward(m, S, steps):
    for _ in range(steps):
        if not S:
            break
        S = image(m, S)
    return S


def _check_arcs(m, arcs):
    if not isinstance(m, PLGraphMap) and not hasattr(m, "branches"):
        raise UnsupportedError(f"{m.name}: independence search needs a piecewise-monotone map")
    arcs = [a if isinstance(a, Subgraph) else Subgraph.make(m.graph, [(m.graph.edge_order[0], c, d) for c, d in a])
            for a in arcs]
    if not arcs:
        raise DomainError("need at least one target arc")
    for i in range(len(arcs)):
        if arcs[i].measure == 0:
            raise DomainError("target arcs need nonempty interiors")
        for j in range(i + 1, len(arcs)):
            if not are_disjoint(arcs[i], arcs[j]):
                raise DomainError("target arcs must be pairwise disjoint")
    return arcs


def _pull_point(m, S, z, steps):
    """A point ``y`` in ``S`` with ``f^steps(y) = z``, or None."""
    chain = [S]
    for _ in range(steps):
        chain.append(image(m, chain[-1]))
    brs = m.branches()
    for E in reversed(chain[:-1]):
        target = Subgraph.from_point(m.graph, m.graph.canonical(z))
        nxt = None
        for br in brs:
            pre = br.pullback(target).intersection(E)
            if pre:
                e, a, _ = pre.arcs[0]
                nxt = GraphPoint(e, a)
                break
        if nxt is None:
            return None
        z = nxt
    return z


def _recover_witness(m, chain, full):
    """Point ``w`` with ``f^{t_i}(w)`` in ``A_{s_i}`` for the chain ``[(t_i, s_i, D_i)]``."""
    e, a, b = chain[-1][2].arcs[0]
    z = GraphPoint(e, (a + b) / 2)
    for (t0, _, D0), (t1, _, _) in zip(chain[-2::-1], chain[:0:-1]):
        z = _pull_point(m, D0, z, t1 - t0)
        if z is None:
            return None
    z = _pull_point(m, full, z, chain[0][0])
    return None if z is None else m.graph.canonical(z)


def _forward_ok(m, w, chain, arcs) -> bool:
    horizon = chain[-1][0] + 1
    pts = orbit(m, w, horizon).points
    return all(arcs[s].contains_point(m.coerce(pts[t])) for t, s, _ in chain)


def _search(m, arcs, times, J_max, budget, greedy):
    k = len(arcs)
    full = Subgraph.full(m.graph)
    checked = 0
    first_failure = None
    exhausted = False
    leaves = None
    J = []
    for t in times:
        if len(J) >= J_max:
            break
        if leaves is None:
            base = _forward(m, full, t)
            new = []
            ok = True
            for s in range(k):
                checked += 1
                D = base.intersection(arcs[s])
                if not D:
                    ok = False
                    first_failure = first_failure or (t, (s,))
                    break
                new.append(_Leaf([(t, s, D)], D, t))
        else:
            if checked + len(leaves) * k > budget:
                exhausted = True
                break
            new = []
            ok = True
            for leaf in leaves:
                leaf.cur = _forward(m, leaf.cur, t - leaf.cur_time)
                leaf.cur_time = t
                for s in range(k):
                    checked += 1
                    D = leaf.cur.intersection(arcs[s])
                    if not D:
                        ok = False
                        if first_failure is None:
                            first_failure = (t, tuple(c[1] for c in leaf.chain) + (s,))
                        break
                    new.append(_Leaf(leaf.chain + [(t, s, D)], D, t))
                if not ok:
                    break
        if ok:
            J.append(t)
            leaves = new
        elif not greedy:
            return J, leaves, checked, first_failure, exhausted, False
    return J, leaves, checked, first_failure, exhausted, True


def _finish(m, arcs, J, leaves, checked, first_failure, exhausted, horizon, complete):
    res = IndependenceResult(list(arcs), tuple(J), complete and bool(J), checked, first_failure=first_failure,
                             budget_exhausted=exhausted, horizon=horizon)
    if not J:
        return res
    full = Subgraph.full(m.graph)
    ok = True
    for leaf in leaves:
        pattern = tuple(s for _, s, _ in leaf.chain)
        w = _recover_witness(m, leaf.chain, full)
        good = w is not None and _forward_ok(m, w, leaf.chain, arcs)
        res.witnesses[pattern] = w
        ok &= good
    res.witnesses_ok = ok
    res.verified = res.verified and ok
    return res


def independence_set_search(m: MapSystem, arcs, J_max: int, budget: int = 10 ** 6, horizon: int | None = None
                            ) -> IndependenceResult:
    """Greedy longest ``J`` in ``{0..horizon}`` such that every symbol pattern over ``J`` is realised.

    Times are tried in increasing order and kept when all patterns extend.
    ``budget`` caps the number of pattern checks; when it runs out the
    partial result is returned with ``budget_exhausted`` set.
    """
    arcs = _check_arcs(m, arcs)
    if len(arcs) ** J_max > budget:
        raise DomainError(f"{len(arcs)}^{J_max} patterns exceed the budget {budget}")
    horizon = 8 * J_max if horizon is None else horizon
    out = _search(m, arcs, range(horizon + 1), J_max, budget, greedy=True)
    J, leaves, checked, ff, exhausted, _ = out
    return _finish(m, arcs, J, leaves, checked, ff, exhausted, horizon, True)


def check_independence(m: MapSystem, arcs, J, budget: int = 10 ** 6) -> IndependenceResult:
    """Decide whether the given finite ``J`` is an independence set for ``arcs``."""
    arcs = _check_arcs(m, arcs)
    J = sorted(set(int(t) for t in J))
    if not J:
        raise DomainError("J must be nonempty")
    out = _search(m, arcs, J, len(J), budget, greedy=False)
    Jf, leaves, checked, ff, exhausted, complete = out
    complete = complete and len(Jf) == len(J)
    if not complete:
        return IndependenceResult(list(arcs), tuple(J), False, checked, first_failure=ff, budget_exhausted=exhausted,
                                  horizon=J[-1])
    return _finish(m, arcs, Jf, leaves, checked, ff, exhausted, J[-1], True)


@dataclass
class IndependenceTrend:
    x: object
    y: object
    rows: list  # (radius, |J|, J, verified)

    @property
    def sizes(self) -> list:
        return [r[1] for r in self.rows]

    @property
    def trend(self) -> str:
        """``collapsing`` when the smallest radius allows at most 2 times, else ``non-collapsing``."""
        return "collapsing" if self.sizes[-1] <= 2 else "non-collapsing"


def classify_IE_IN_IT(m: MapSystem, x, y, radii, J_max: int = 10, budget: int = 10 ** 6,
                      horizon: int | None = None) -> IndependenceTrend:
    """Independence-set size for balls of shrinking radius around ``x`` and ``y``."""
    p, q = m.coerce(x), m.coerce(y)
    if p == q:
        raise DomainError("x and y must differ (diagonal pairs are not classified)")
    radii = sorted((Fraction(str(r)) if isinstance(r, float) else Fraction(r) for r in radii), reverse=True)
    rows = []
    for r in radii:
        A, B = ball(m.graph, p, r), ball(m.graph, q, r)
        if not are_disjoint(A, B):
            raise DomainError(f"balls of radius {r} around x and y meet")
        res = independence_set_search(m, [A, B], J_max, budget, horizon)
        rows.append((r, res.size, res.J, res.verified))
    return IndependenceTrend(x, y, rows)
