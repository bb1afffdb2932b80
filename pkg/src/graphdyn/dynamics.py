"""Continuous self-maps of compact metric spaces, with a focus on graph maps.

Three concrete families live here:

* :class:`PLGraphMap` -- piecewise-linear maps of a metric graph, evaluated
  exactly on ``Fraction`` coordinates (rotations are a special case).
* :class:`AnalyticIntervalMap` / :class:`LogisticMap` -- smooth interval maps
  with known critical points; preimages use monotone-branch inversion.
* :class:`AbstractSystem` -- user-supplied evaluation and metric.

Every system also exposes a vectorised float simulation used by the
statistics modules; one-edge systems hand a compact table to the compiled
kernels in :mod:`graphdyn._kernels`.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, NotMarkovError, UnsupportedError
from .metric_graph import (
    Graph,
    GraphPoint,
    Subgraph,
    distance as graph_distance,
    diameter as graph_diameter,
    graph_from_dict,
    graph_to_dict,
    to_exact,
    unit_interval,
)

__all__ = [
    "MapSystem",
    "PLPiece",
    "PLGraphMap",
    "AnalyticIntervalMap",
    "LogisticMap",
    "AbstractSystem",
    "Orbit",
    "orbit",
    "image",
    "preimage",
    "restricted_preimage",
    "markov_partition",
    "markov_matrix",
    "map_from_dict",
    "map_to_dict",
    "load_map",
]


def _is_scalar(p) -> bool:
    return isinstance(p, (int, float, Fraction, str, np.integer, np.floating)) and not isinstance(p, bool)


def _coord(x):
    if isinstance(x, (float, np.floating)):
        return float(x)
    return to_exact(x)


class MapSystem:
    """Base class: a point set, a metric and a continuous self-map."""

    graph: Graph | None = None
    name: str = "system"

    # -- exact / python-level interface ---------------------------------------
    def coerce(self, p):
        return p

    def evaluate(self, p):
        raise NotImplementedError

    def distance(self, p, q):
        raise NotImplementedError

    def branches(self) -> list:
        raise UnsupportedError(f"{self.name} has no monotone-branch structure")

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    # -- float simulation -----------------------------------------------------
    kernel = None

    def to_states(self, points) -> np.ndarray:
        raise NotImplementedError

    def float_step(self, S: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def float_dist(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_states(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def perturb_states(self, S, radius, rng) -> np.ndarray:
        raise NotImplementedError

    def state_coordinate(self, S) -> np.ndarray:
        """Real coordinate of each state, used by observables."""
        raise NotImplementedError

    def float_orbit(self, p, n: int) -> np.ndarray:
        """States f^0(p) .. f^{n-1}(p) as an array with leading axis n."""
        S = self.to_states([p])
        if self.kernel is not None:
            kind, px, py, ps, par = self.kernel
            return _kernels.orbit(kind, float(S[0]), int(n), px, py, ps, par)
        out = np.empty((n,) + S.shape[1:], dtype=S.dtype)
        s = S
        for k in range(n):
            out[k] = s[0]
            s = self.float_step(s)
        return out

    def float_orbits(self, S: np.ndarray, n: int) -> np.ndarray:
        """Orbits of many states; shape (len(S), n, ...)."""
        S = np.asarray(S)
        if self.kernel is not None:
            kind, px, py, ps, par = self.kernel
            return _kernels.orbits(kind, S.astype(float), int(n), px, py, ps, par)
        out = np.empty((S.shape[0], n) + S.shape[1:], dtype=S.dtype)
        s = S
        for k in range(n):
            out[:, k] = s
            s = self.float_step(s)
        return out

    @property
    def is_interval(self) -> bool:
        g = self.graph
        return g is not None and g.is_single_edge and not g.edges[g.edge_order[0]].is_loop

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class _GraphBacked(MapSystem):
    """Shared plumbing for maps whose state space is a metric graph."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self._e0 = graph.edge_order[0]
        self._L = graph.edges[self._e0].length
        self._one_edge = graph.is_single_edge
        self._wrap = self._one_edge and graph.edges[self._e0].is_loop

    def coerce(self, p) -> GraphPoint:
        if isinstance(p, GraphPoint):
            return self.graph.canonical(p)
        if _is_scalar(p) and self._one_edge:
            x = _coord(p)
            if self._wrap and x == self._L:
                x = 0 * x
            return self.graph.point(self._e0, x)
        raise DomainError(f"{p!r} is not a point of {self.name}")

    def _out(self, like, q: GraphPoint):
        if isinstance(like, GraphPoint):
            return q
        if self._wrap and q.offset == self._L:
            return 0 * q.offset
        return q.offset

    def distance(self, p, q):
        return graph_distance(self.graph, self.coerce(p), self.coerce(q))

    @property
    def diameter(self) -> float:
        return float(graph_diameter(self.graph, Subgraph.full(self.graph)))

    # float states: one edge -> offsets (n,), otherwise (n, 2) [edge index, offset]
    def to_states(self, points) -> np.ndarray:
        pts = [self.coerce(p) for p in points]
        if self._one_edge:
            return np.array([float(p.offset) for p in pts])
        return np.array([[self.graph.edge_index[p.edge], float(p.offset)] for p in pts])

    def from_state(self, s):
        if self._one_edge:
            return float(s)
        return GraphPoint(self.graph.edge_order[int(s[0])], float(s[1]))

    def float_dist(self, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if self._one_edge:
            d = np.abs(A - B)
            if self._wrap:
                d = np.minimum(d, float(self._L) - d)
            return d
        return self.graph.distance_array(A[..., 0], A[..., 1], B[..., 0], B[..., 1])

    def sample_states(self, rng, n):
        g = self.graph
        if self._one_edge:
            return rng.uniform(0.0, float(self._L), n)
        lengths = g._lengths_f
        e = rng.choice(len(lengths), size=n, p=lengths / lengths.sum())
        return np.column_stack([e.astype(float), rng.uniform(0.0, 1.0, n) * lengths[e]])

    def perturb_states(self, S, radius, rng):
        S = np.asarray(S, dtype=float)
        if self._one_edge:
            L = float(self._L)
            y = S + rng.uniform(-radius, radius, S.shape)
            if self._wrap:
                return np.mod(y, L)
            return np.clip(y, 0.0, L)
        lengths = self.graph._lengths_f
        e = S[:, 0].astype(int)
        off = np.clip(S[:, 1] + rng.uniform(-radius, radius, len(S)), 0.0, lengths[e])
        return np.column_stack([S[:, 0], off])

    def state_coordinate(self, S):
        S = np.asarray(S, dtype=float)
        return S if self._one_edge else S[..., 1]

    def float_step(self, S):
        S = np.asarray(S, dtype=float)
        if self.kernel is not None:
            kind, px, py, ps, par = self.kernel
            return np.array([_kernels.step(kind, x, px, py, ps, par) for x in S.ravel()]).reshape(S.shape)
        return self._np_step(S)

    def _np_step(self, S):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Piecewise-linear graph maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PLPiece:
    """Affine piece: source arc ``[a, b]`` of ``edge`` onto an edge path.

    ``path`` lists ``(edge_id, direction)`` steps; the image starts at offset
    ``start`` of the first step's edge and ends at ``end`` on the last one.
    ``orientation = +1`` sends ``a`` to the start of the path.  A path of
    length zero makes the piece constant.
    """

    edge: Hashable
    a: Fraction
    b: Fraction
    path: tuple
    start: Fraction
    end: Fraction
    orientation: int = 1


@dataclass
class _Segment:
    edge: Hashable
    off0: object  # offset at pos0
    off1: object
    pos0: object
    pos1: object
    direction: int

    def offset_at(self, t):
        return self.off0 + self.direction * (t - self.pos0)

    def position_of(self, off):
        return self.pos0 + self.direction * (off - self.off0)


class _PLBranch:
    """One affine piece viewed as a monotone branch."""

    def __init__(self, owner: "PLGraphMap", idx: int):
        self.owner = owner
        self.idx = idx
        self.piece = owner.pieces[idx]
        self.segments = owner._segments[idx]
        self.length = owner._path_len[idx]
        self.domain = Subgraph.make(owner.graph, [(self.piece.edge, self.piece.a, self.piece.b)])

    # source offset <-> path position
    def _pos(self, s):
        pc = self.piece
        frac = (s - pc.a) / (pc.b - pc.a)
        if pc.orientation < 0:
            frac = 1 - frac
        return frac * self.length

    def _src(self, t):
        pc = self.piece
        frac = t / self.length
        if pc.orientation < 0:
            frac = 1 - frac
        return pc.a + frac * (pc.b - pc.a)

    def locate(self, t) -> GraphPoint:
        for seg in self.segments:
            if seg.pos0 <= t <= seg.pos1:
                return self.owner.graph.point(seg.edge, seg.offset_at(t))
        seg = self.segments[-1]
        return self.owner.graph.point(seg.edge, seg.offset_at(min(t, seg.pos1)))

    def evaluate(self, s) -> GraphPoint:
        if self.length == 0:
            return self.locate(0 * s)
        return self.locate(self._pos(s))

    def image(self, sub: Subgraph) -> Subgraph:
        """f(sub ∩ domain)."""
        g = self.owner.graph
        pc = self.piece
        arcs = []
        for e, c, d in sub.arcs:
            if e != pc.edge:
                continue
            lo, hi = max(c, pc.a), min(d, pc.b)
            if lo > hi:
                continue
            if self.length == 0:
                q = self.locate(0 * lo)
                arcs.append((q.edge, q.offset, q.offset))
                continue
            t1, t2 = sorted((self._pos(lo), self._pos(hi)))
            for seg in self.segments:
                u, v = max(t1, seg.pos0), min(t2, seg.pos1)
                if u <= v:
                    o1, o2 = sorted((seg.offset_at(u), seg.offset_at(v)))
                    arcs.append((seg.edge, o1, o2))
        for v in sub.vertices():
            e = g.edges[pc.edge]
            for off in (pc.a, pc.b):
                if (off == 0 and e.u == v) or (off == e.length and e.v == v):
                    q = self.evaluate(off)
                    arcs.append((q.edge, q.offset, q.offset))
        return Subgraph.make(g, arcs)

    def pullback(self, target: Subgraph) -> Subgraph:
        """{x in domain : f(x) in target}."""
        g = self.owner.graph
        pc = self.piece
        if self.length == 0:
            if target.contains_point(self.locate(pc.a * 0)):
                return self.domain
            return Subgraph.empty(g)
        tv = target.vertices()
        pos = []
        for seg in self.segments:
            lo, hi = sorted((seg.off0, seg.off1))
            for e, c, d in target.arcs:
                if e != seg.edge:
                    continue
                u, v = max(lo, c), min(hi, d)
                if u <= v:
                    pos.append(tuple(sorted((seg.position_of(u), seg.position_of(v)))))
            if tv:
                edge = g.edges[seg.edge]
                for off in (seg.off0, seg.off1):
                    vid = edge.u if off == 0 else (edge.v if off == edge.length else None)
                    if vid in tv:
                        t = seg.position_of(off)
                        pos.append((t, t))
        arcs = []
        for t1, t2 in pos:
            s1, s2 = sorted((self._src(t1), self._src(t2)))
            arcs.append((pc.edge, max(s1, pc.a), min(s2, pc.b)))
        return Subgraph.make(g, arcs)


class PLGraphMap(_GraphBacked):
    """Continuous piecewise-linear self-map of a metric graph.

    Pieces must tile every edge; continuity at piece boundaries and vertices
    is checked exactly at construction.
    """

    def __init__(self, graph: Graph, pieces: Sequence[PLPiece], name: str = "pl"):
        super().__init__(graph)
        self.name = name
        self.pieces = tuple(self._clean(p) for p in pieces)
        if not self.pieces:
            raise DomainError("a PL map needs at least one piece")
        self._segments = []
        self._path_len = []
        for pc in self.pieces:
            segs, total = self._build_segments(pc)
            self._segments.append(segs)
            self._path_len.append(total)
        self._branches = [_PLBranch(self, i) for i in range(len(self.pieces))]
        self._by_edge = {}
        for i, pc in enumerate(self.pieces):
            self._by_edge.setdefault(pc.edge, []).append(i)
        for e in self._by_edge:
            self._by_edge[e].sort(key=lambda i: self.pieces[i].a)
        self._ends = {e: [self.pieces[i].b for i in idx] for e, idx in self._by_edge.items()}
        self._validate()
        self.kernel = self._make_kernel()

    # -- construction ---------------------------------------------------------
    def _clean(self, pc) -> PLPiece:
        if not isinstance(pc, PLPiece):
            pc = PLPiece(*pc)
        if pc.edge not in self.graph.edges:
            raise DomainError(f"piece on unknown edge {pc.edge!r}")
        a, b = to_exact(pc.a), to_exact(pc.b)
        if not a < b:
            raise DomainError(f"piece source [{a}, {b}] is degenerate")
        if pc.orientation not in (1, -1):
            raise DomainError("orientation must be +1 or -1")
        path = tuple((e, int(d)) for e, d in pc.path)
        return PLPiece(pc.edge, a, b, path, to_exact(pc.start), to_exact(pc.end), pc.orientation)

    def _build_segments(self, pc: PLPiece):
        g = self.graph
        if not pc.path:
            raise DomainError("empty target path")
        for e, d in pc.path:
            if e not in g.edges or d not in (1, -1):
                raise DomainError(f"bad path step {(e, d)!r}")
        for (e1, d1), (e2, d2) in zip(pc.path, pc.path[1:]):
            E1, E2 = g.edges[e1], g.edges[e2]
            head = E1.v if d1 > 0 else E1.u
            tail = E2.u if d2 > 0 else E2.v
            if head != tail:
                raise DomainError(f"path steps {e1!r} -> {e2!r} are not adjacent")
            if e1 == e2 and d1 != d2 and not E1.is_loop:
                raise DomainError("target paths may not backtrack along an edge")
        segs = []
        pos = Fraction(0)
        n = len(pc.path)
        for k, (e, d) in enumerate(pc.path):
            L = g.edges[e].length
            o0 = pc.start if k == 0 else (Fraction(0) if d > 0 else L)
            o1 = pc.end if k == n - 1 else (L if d > 0 else Fraction(0))
            if not (0 <= o0 <= L and 0 <= o1 <= L):
                raise DomainError("path offsets out of range")
            ln = (o1 - o0) * d
            if ln < 0:
                raise DomainError(f"path runs against direction on edge {e!r}")
            segs.append(_Segment(e, o0, o1, pos, pos + ln, d))
            pos += ln
        return segs, pos

    def _validate(self):
        g = self.graph
        for eid in g.edge_order:
            idx = self._by_edge.get(eid)
            if not idx:
                raise DomainError(f"edge {eid!r} not covered by pieces")
            pcs = [self.pieces[i] for i in idx]
            if pcs[0].a != 0 or pcs[-1].b != g.edges[eid].length:
                raise DomainError(f"pieces do not cover edge {eid!r}")
            for i, (p, q) in enumerate(zip(pcs, pcs[1:])):
                if p.b != q.a:
                    raise DomainError(f"gap or overlap between pieces on edge {eid!r}")
                y1 = self._branches[idx[i]].evaluate(p.b)
                y2 = self._branches[idx[i + 1]].evaluate(q.a)
                if y1 != y2:
                    raise DomainError(f"discontinuity at offset {p.b} of edge {eid!r}")
        at_vertex = {}
        for i, pc in enumerate(self.pieces):
            e = g.edges[pc.edge]
            if pc.a == 0:
                at_vertex.setdefault(e.u, set()).add(self._branches[i].evaluate(pc.a))
            if pc.b == e.length:
                at_vertex.setdefault(e.v, set()).add(self._branches[i].evaluate(pc.b))
        for v, vals in at_vertex.items():
            if len(vals) > 1:
                raise DomainError(f"discontinuity at vertex {v!r}")

    def _make_kernel(self):
        if not self._one_edge:
            return None
        px, py, ps = [], [], []
        for i in self._by_edge[self._e0]:
            pc, segs, ln = self.pieces[i], self._segments[i], self._path_len[i]
            dirs = {s.direction for s in segs}
            if len(dirs) > 1:
                return None
            d = dirs.pop()
            slope = d * ln / (pc.b - pc.a)
            y_a = pc.start if pc.orientation > 0 else pc.start + d * ln
            if pc.orientation < 0:
                slope = -slope
            px.append(pc.a)
            py.append(y_a)
            ps.append(slope)
        dyadic = all(_dyadic(v) for v in px + py) and all(
            s != 0 and _dyadic(s) and _dyadic(1 / s) for s in ps
        ) and any(abs(s) >= 2 for s in ps)
        par = np.array([1.0 if self._wrap else 0.0, float(self._L), 1.0 if dyadic else 0.0])
        return (
            _kernels.PL,
            np.array([float(v) for v in px]),
            np.array([float(v) for v in py]),
            np.array([float(v) for v in ps]),
            par,
        )

    # -- evaluation -----------------------------------------------------------
    def branch_at(self, p: GraphPoint) -> _PLBranch:
        idx = self._by_edge[p.edge]
        j = bisect.bisect_left(self._ends[p.edge], p.offset)
        return self._branches[idx[min(j, len(idx) - 1)]]

    def evaluate(self, p):
        q = self.coerce(p)
        return self._out(p, self.branch_at(q).evaluate(q.offset))

    def branches(self):
        return list(self._branches)

    def _np_step(self, S):
        g = self.graph
        e = S[:, 0].astype(int)
        off = S[:, 1]
        out = np.empty_like(S)
        done = np.zeros(len(S), dtype=bool)
        for br in self._branches:
            pc = br.piece
            ei = g.edge_index[pc.edge]
            m = (~done) & (e == ei) & (off >= float(pc.a)) & (off <= float(pc.b))
            if not m.any():
                continue
            done |= m
            if br.length == 0:
                q = br.locate(Fraction(0))
                out[m, 0] = g.edge_index[q.edge]
                out[m, 1] = float(q.offset)
                continue
            frac = (off[m] - float(pc.a)) / float(pc.b - pc.a)
            if pc.orientation < 0:
                frac = 1.0 - frac
            t = frac * float(br.length)
            res_e = np.empty(t.shape)
            res_o = np.empty(t.shape)
            assigned = np.zeros(t.shape, dtype=bool)
            for seg in br.segments:
                sm = (~assigned) & (t <= float(seg.pos1) + 1e-15)
                if seg is br.segments[-1]:
                    sm = ~assigned
                res_e[sm] = g.edge_index[seg.edge]
                res_o[sm] = float(seg.off0) + seg.direction * (t[sm] - float(seg.pos0))
                assigned |= sm
            out[m, 0] = res_e
            out[m, 1] = np.clip(res_o, 0.0, g._lengths_f[res_e.astype(int)])
        return out

    # -- interval-map structure -----------------------------------------------
    def knots(self) -> list:
        """``[(x, f(x)), ...]`` at piece boundaries of a one-edge map."""
        if not self._one_edge:
            raise UnsupportedError("knots are defined for one-edge maps")
        idx = self._by_edge[self._e0]
        xs = [self.pieces[idx[0]].a] + [self.pieces[i].b for i in idx]
        return [(x, self._branches[idx[min(k, len(idx) - 1)]].evaluate(x).offset) for k, x in enumerate(xs)]

    def with_name(self, name):
        self.name = name
        return self

    @classmethod
    def interval(cls, knots, graph: Graph | None = None, name="pl") -> "PLGraphMap":
        """Interval map through the points ``knots = [(x0, y0), ...]``.

        ``x`` must increase strictly from 0 to the edge length.
        """
        g = graph or unit_interval()
        if not g.is_single_edge or g.edges[g.edge_order[0]].is_loop:
            raise DomainError("interval maps need a one-edge, non-loop graph")
        e0 = g.edge_order[0]
        pts = [(to_exact(x), to_exact(y)) for x, y in knots]
        pieces = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            d = 1 if y1 >= y0 else -1
            pieces.append(PLPiece(e0, x0, x1, ((e0, d),), y0, y1, 1))
        return cls(g, pieces, name=name)


def _dyadic(q) -> bool:
    q = Fraction(q)
    den = q.denominator
    return den & (den - 1) == 0


# ---------------------------------------------------------------------------
# Analytic interval maps
# ---------------------------------------------------------------------------


class _MonotoneBranch:
    """Monotone branch of a smooth interval map on ``[lo, hi]``."""

    def __init__(self, owner: "AnalyticIntervalMap", lo, hi):
        self.owner = owner
        self.lo, self.hi = lo, hi
        self.f_lo, self.f_hi = owner.f(lo), owner.f(hi)
        self.increasing = self.f_hi >= self.f_lo
        self.domain = Subgraph.make(owner.graph, [(owner._e0, lo, hi)])

    def evaluate(self, s):
        return self.owner.graph.point(self.owner._e0, min(max(self.owner.f(s), 0.0), float(self.owner._L)))

    def image(self, sub):
        arcs = []
        for _, c, d in sub.arcs:
            lo, hi = max(c, self.lo), min(d, self.hi)
            if lo <= hi:
                y1, y2 = sorted((self.owner.f(lo), self.owner.f(hi)))
                arcs.append((self.owner._e0, max(y1, 0.0), min(y2, float(self.owner._L))))
        return Subgraph.make(self.owner.graph, arcs)

    def inverse(self, y):
        return self.owner.branch_inverse(self, y)

    def pullback(self, target):
        tol = self.owner.inverse_tol
        ymin, ymax = sorted((self.f_lo, self.f_hi))
        arcs = []
        for _, c, d in target.arcs:
            c, d = max(float(c), ymin), min(float(d), ymax)
            if c > d:
                continue
            x1, x2 = sorted((self.inverse(c), self.inverse(d)))
            # outward rounding so the returned set contains the true preimage
            arcs.append((self.owner._e0, max(self.lo, x1 - tol), min(self.hi, x2 + tol)))
        return Subgraph.make(self.owner.graph, arcs)


class AnalyticIntervalMap(_GraphBacked):
    """Smooth map of ``[0, 1]`` given by a vectorisable callable.

    ``critical_points`` splits the interval into monotone branches, which are
    inverted by bisection to ``inverse_tol``.
    """

    inverse_tol = 1e-14

    def __init__(self, f: Callable, critical_points: Sequence[float] = (), name="analytic"):
        super().__init__(unit_interval())
        self.f = f
        self.name = name
        cuts = [0.0] + sorted(float(c) for c in critical_points) + [1.0]
        self._branches = [_MonotoneBranch(self, a, b) for a, b in zip(cuts, cuts[1:])]

    def evaluate(self, p):
        q = self.coerce(p)
        y = self.f(q.offset)
        if isinstance(y, (float, np.floating)):
            y = min(max(float(y), 0.0), 1.0)
        return self._out(p, self.graph.point(self._e0, y))

    def branches(self):
        return list(self._branches)

    def branch_inverse(self, br, y):
        lo, hi = br.lo, br.hi
        for _ in range(200):
            if hi - lo <= self.inverse_tol:
                break
            mid = 0.5 * (lo + hi)
            if (self.f(mid) < y) == br.increasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _np_step(self, S):
        return np.clip(self.f(S), 0.0, 1.0)

    def float_step(self, S):
        return self._np_step(np.asarray(S, dtype=float))


class LogisticMap(AnalyticIntervalMap):
    """``x -> r x (1 - x)`` on the unit interval, ``0 < r <= 4``."""

    def __init__(self, r):
        rf = float(r)
        if not 0 < rf <= 4:
            raise DomainError("logistic parameter must lie in (0, 4]")
        self.r = r
        super().__init__(lambda x: r * x * (1 - x), critical_points=(0.5,), name=f"logistic({rf:.10g})")
        self.kernel = (
            _kernels.LOGISTIC,
            np.zeros(1),
            np.zeros(1),
            np.zeros(1),
            np.array([rf, 1.0, 0.0]),
        )

    def branch_inverse(self, br, y):
        # closed form on each side of the critical point
        r = float(self.r)
        disc = max(0.0, 1.0 - 4.0 * float(y) / r)
        root = 0.5 * math.sqrt(disc)
        x = 0.5 - root if br.hi <= 0.5 else 0.5 + root
        return min(max(x, br.lo), br.hi)

    def float_step(self, S):
        S = np.asarray(S, dtype=float)
        return float(self.r) * S * (1.0 - S)


# ---------------------------------------------------------------------------
# Abstract systems
# ---------------------------------------------------------------------------


class AbstractSystem(MapSystem):
    """System given by python callables; float states are object arrays."""

    def __init__(self, evaluate: Callable, metric: Callable, sampler: Callable | None = None,
                 coordinate: Callable | None = None, diameter: float = math.inf, name="abstract"):
        self._f = evaluate
        self._d = metric
        self._sampler = sampler
        self._coord = coordinate
        self._diam = diameter
        self.name = name

    def evaluate(self, p):
        return self._f(p)

    def distance(self, p, q):
        return self._d(p, q)

    @property
    def diameter(self):
        return self._diam

    def to_states(self, points):
        out = np.empty(len(points), dtype=object)
        for i, p in enumerate(points):
            out[i] = p
        return out

    def float_step(self, S):
        out = np.empty(len(S), dtype=object)
        for i, p in enumerate(S):
            out[i] = self._f(p)
        return out

    def float_dist(self, A, B):
        return np.array([float(self._d(a, b)) for a, b in zip(A, B)])

    def sample_states(self, rng, n):
        if self._sampler is None:
            raise UnsupportedError(f"{self.name} has no sampler")
        return self.to_states([self._sampler(rng) for _ in range(n)])

    def state_coordinate(self, S):
        if self._coord is None:
            raise UnsupportedError(f"{self.name} has no coordinate observable")
        return np.array([float(self._coord(p)) for p in S])


# ---------------------------------------------------------------------------
# Orbits, images and preimages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    base: object
    N: int
    points: tuple = field(repr=False)

    def __len__(self):
        return self.N

    def __getitem__(self, k):
        return self.points[k]


def orbit(m: MapSystem, p, N: int) -> Orbit:
    """First ``N`` iterates ``p, f(p), ..., f^{N-1}(p)`` (exact when ``p`` is)."""
    if N < 1:
        raise DomainError("orbit length must be at least 1")
    m.coerce(p)
    pts = [p]
    x = p
    for _ in range(N - 1):
        x = m.evaluate(x)
        pts.append(x)
    return Orbit(p, N, tuple(pts))


def _as_subgraph(m: MapSystem, a) -> Subgraph:
    if isinstance(a, Subgraph):
        return a
    return Subgraph.make(m.graph, [(m.graph.edge_order[0], c, d) for c, d in a])


def image(m: MapSystem, a) -> Subgraph:
    """Exact (PL) or evaluated (analytic) image of a subgraph."""
    a = _as_subgraph(m, a)
    out = Subgraph.empty(m.graph)
    for br in m.branches():
        part = a.intersection(br.domain)
        if part:
            out = out.union(br.image(part))
    return out


def preimage(m: MapSystem, a) -> Subgraph:
    """f^{-1}(a) as a normalised subgraph."""
    a = _as_subgraph(m, a)
    out = Subgraph.empty(m.graph)
    for br in m.branches():
        out = out.union(br.pullback(a))
    return out


def restricted_preimage(m: MapSystem, D, A, j: int) -> Subgraph:
    """``{x in D : f^j(x) in A}``, following only branches that meet ``D``."""
    D = _as_subgraph(m, D)
    A = _as_subgraph(m, A)
    if j == 0:
        return D.intersection(A)
    out = Subgraph.empty(m.graph)
    for br in m.branches():
        part = D.intersection(br.domain)
        if not part:
            continue
        nxt = restricted_preimage(m, br.image(part), A, j - 1)
        if nxt:
            out = out.union(br.pullback(nxt).intersection(part))
    return out


# ---------------------------------------------------------------------------
# Markov structure
# ---------------------------------------------------------------------------


def _breakpoints(m: PLGraphMap) -> dict:
    pts = {}
    for pc in m.pieces:
        pts.setdefault(pc.edge, set()).update((pc.a, pc.b))
    return pts


def markov_partition(m: PLGraphMap, max_points: int = 100000) -> dict:
    """Smallest forward-invariant refinement of the breakpoint partition.

    Returns ``{edge: sorted offsets}``.  Raises :class:`NotMarkovError` when
    breakpoint orbits are not eventually periodic within ``max_points``.
    """
    if not isinstance(m, PLGraphMap):
        raise UnsupportedError("Markov partitions need a PL map")
    g = m.graph
    pts = _breakpoints(m)
    seen = {(e, o) for e, offs in pts.items() for o in offs}
    frontier = list(seen)
    while frontier:
        e, o = frontier.pop()
        q = m.evaluate(GraphPoint(e, o))
        key = (q.edge, q.offset)
        if g.vertex_at(q) is not None or key in seen:
            continue
        seen.add(key)
        pts.setdefault(q.edge, set()).add(q.offset)
        frontier.append(key)
        if len(seen) > max_points:
            raise NotMarkovError("breakpoint orbits do not close up; no finite Markov partition found")
    for eid in g.edge_order:
        pts.setdefault(eid, set()).update((Fraction(0), g.edges[eid].length))
    return {e: sorted(v) for e, v in pts.items()}


def markov_matrix(m: MapSystem, partition: dict | None = None) -> np.ndarray:
    """0/1 transition matrix of the cells of ``partition`` (default: breakpoints).

    Cells are ordered by edge, then offset.  Entry ``[i, j]`` is 1 iff cell
    ``j`` lies in the image of cell ``i``.
    """
    if not isinstance(m, PLGraphMap):
        raise NotMarkovError(f"{m.name} is not piecewise linear")
    g = m.graph
    if partition is None:
        partition = {e: sorted(v | {Fraction(0), g.edges[e].length}) for e, v in _breakpoints(m).items()}
    cells = []
    for eid in g.edge_order:
        offs = partition[eid]
        cells += [(eid, a, b) for a, b in zip(offs, offs[1:])]
    points = {(e, o) for e, offs in partition.items() for o in offs}

    def is_partition_point(q: GraphPoint):
        if g.vertex_at(q) is not None:
            return True
        return (q.edge, q.offset) in points

    for br in m.branches():
        pc = br.piece
        offs = partition[pc.edge]
        inner = [o for o in offs if pc.a < o < pc.b]
        for o in [pc.a, pc.b] + inner:
            if not is_partition_point(br.evaluate(o)):
                raise NotMarkovError(
                    f"piece {m.pieces.index(pc)} sends partition point {o} off the partition", piece=pc
                )
    M = np.zeros((len(cells), len(cells)), dtype=np.int64)
    doms = [Subgraph.make(g, [c]) for c in cells]
    for i, c in enumerate(cells):
        img = image(m, doms[i])
        for j, d in enumerate(cells):
            if img.contains(doms[j]):
                M[i, j] = 1
    return M


# ---------------------------------------------------------------------------
# JSON definitions
# ---------------------------------------------------------------------------


def map_from_dict(d: dict) -> MapSystem:
    """Build a system from a JSON-style definition (see README)."""
    from . import zoo

    kind = d.get("kind")
    params = d.get("params", {}) or {}
    if kind in ("pl", "interval"):
        g = graph_from_dict(d.get("graph", "unit_interval"))
        if "knots" in d:
            return PLGraphMap.interval(d["knots"], graph=g, name=d.get("name", "pl"))
        pieces = []
        for p in d["pieces"]:
            pieces.append(
                PLPiece(p["edge"], to_exact(p["source"][0]), to_exact(p["source"][1]),
                        tuple((s[0], int(s[1])) for s in p["path"]),
                        to_exact(p["start"]), to_exact(p["end"]), int(p.get("orientation", 1)))
            )
        return PLGraphMap(g, pieces, name=d.get("name", "pl"))
    if kind == "zoo":
        return zoo.make(d["name"], **params)
    builders = {
        "tent": lambda: zoo.make_tent(params.get("s", 2)),
        "full_tent": zoo.make_full_tent,
        "logistic": lambda: zoo.make_logistic(params["r"]),
        "rotation": lambda: zoo.make_rotation(params["alpha"]),
        "doubling_solenoid": lambda: zoo.make_doubling_solenoid(int(params["depth"])),
        "feigenbaum": zoo.make_feigenbaum_logistic,
        "identity": zoo.make_identity,
        "golden_mean": zoo.make_golden_mean,
        "paper_example": zoo.make_paper_example,
    }
    if kind not in builders:
        raise DomainError(f"unknown map kind {kind!r}")
    return builders[kind]()


def _enc(x):
    return str(x) if isinstance(x, Fraction) else x


def map_to_dict(m: MapSystem) -> dict:
    if isinstance(m, PLGraphMap):
        return {
            "kind": "pl",
            "name": m.name,
            "graph": graph_to_dict(m.graph),
            "pieces": [
                {
                    "edge": pc.edge,
                    "source": [_enc(pc.a), _enc(pc.b)],
                    "path": [[e, d] for e, d in pc.path],
                    "start": _enc(pc.start),
                    "end": _enc(pc.end),
                    "orientation": pc.orientation,
                }
                for pc in m.pieces
            ],
        }
    spec = getattr(m, "spec", None)
    if spec is not None:
        return dict(spec)
    raise UnsupportedError(f"{m.name} has no JSON form")


def load_map(path) -> MapSystem:
    with open(path) as fh:
        return map_from_dict(json.load(fh))
