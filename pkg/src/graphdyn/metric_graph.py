"""Metric graphs: finite 1-complexes with the arc-length shortest-path metric.

A :class:`Graph` is a set of vertices joined by edges of positive length.
Points live on edges (:class:`GraphPoint`), and closed subsets that are finite
unions of arcs are :class:`Subgraph` values.  Coordinates may be ``Fraction``
(exact) or ``float``; arithmetic keeps whatever precision it is given, so
subgraphs built from exact data support exact disjointness decisions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "Edge",
    "Graph",
    "GraphPoint",
    "Subgraph",
    "to_exact",
    "distance",
    "diameter",
    "are_disjoint",
    "unit_interval",
    "unit_circle",
    "load_graph",
    "graph_from_dict",
]


def to_exact(x):
    """Convert ``x`` to a ``Fraction`` when it carries an exact value.

    Strings such as ``"1/3"`` or ``"0.4"`` are parsed as decimals/rationals;
    floats are converted to their exact binary value.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not coordinates")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise DomainError(f"cannot interpret {x!r} as a coordinate")


def _num(x):
    # Keep floats as floats, everything else exact.
    if isinstance(x, (float, np.floating)):
        return float(x)
    return to_exact(x)


@dataclass(frozen=True)
class Edge:
    id: Hashable
    u: Hashable
    v: Hashable
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class GraphPoint:
    """A point ``offset`` units along ``edge`` (measured from the edge's ``u`` end)."""

    edge: Hashable
    offset: object


class Graph:
    """Connected metric 1-complex.

    Parameters
    ----------
    vertices : iterable of vertex ids
    edges : iterable of ``(id, u, v, length)`` tuples
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Sequence]):
        self.vertices: tuple = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise DomainError("duplicate vertex ids")
        self.edges: dict = {}
        for e in edges:
            eid, u, v, length = e
            if eid in self.edges:
                raise DomainError(f"duplicate edge id {eid!r}")
            if u not in self.vertices or v not in self.vertices:
                raise DomainError(f"edge {eid!r} references an unknown vertex")
            length = to_exact(length)
            if length <= 0:
                raise DomainError(f"edge {eid!r} has non-positive length")
            self.edges[eid] = Edge(eid, u, v, length)
        if not self.edges:
            raise DomainError("a graph needs at least one edge")
        self.edge_order: tuple = tuple(self.edges)
        self.edge_index = {eid: i for i, eid in enumerate(self.edge_order)}
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.total_length: Fraction = sum((e.length for e in self.edges.values()), Fraction(0))
        self._check_connected()
        self._designated = self._designate_vertex_edges()
        self._vdist = self._all_pairs()
        self._vdist_f = np.array([[float(d) for d in row] for row in self._vdist])
        self._lengths_f = np.array([float(self.edges[e].length) for e in self.edge_order])
        self._u_idx = np.array([self.vertex_index[self.edges[e].u] for e in self.edge_order])
        self._v_idx = np.array([self.vertex_index[self.edges[e].v] for e in self.edge_order])

    # -- construction helpers -------------------------------------------------
    def _check_connected(self):
        parent = {v: v for v in self.vertices}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        touched = set()
        for e in self.edges.values():
            touched.update((e.u, e.v))
            parent[find(e.u)] = find(e.v)
        if touched != set(self.vertices):
            raise DomainError("graph has isolated vertices")
        roots = {find(v) for v in self.vertices}
        if len(roots) != 1:
            raise DomainError("graph is not connected")

    def _designate_vertex_edges(self):
        out = {}
        for eid in self.edge_order:
            e = self.edges[eid]
            out.setdefault(e.u, (eid, Fraction(0)))
            out.setdefault(e.v, (eid, e.length))
        return out

    def _all_pairs(self):
        n = len(self.vertices)
        inf = None
        d = [[inf] * n for _ in range(n)]
        for i in range(n):
            d[i][i] = Fraction(0)
        for e in self.edges.values():
            i, j = self.vertex_index[e.u], self.vertex_index[e.v]
            if d[i][j] is None or e.length < d[i][j]:
                d[i][j] = d[j][i] = e.length if i != j else Fraction(0)
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik is None:
                    continue
                di = d[i]
                for j in range(n):
                    if dk[j] is None:
                        continue
                    cand = dik + dk[j]
                    if di[j] is None or cand < di[j]:
                        di[j] = cand
        return d

    # -- points ---------------------------------------------------------------
    @property
    def is_single_edge(self) -> bool:
        return len(self.edges) == 1

    def point(self, edge, offset) -> GraphPoint:
        """Validated, canonical point; vertices map to their designated edge."""
        if edge not in self.edges:
            raise DomainError(f"unknown edge {edge!r}")
        offset = _num(offset)
        e = self.edges[edge]
        if offset < 0 or offset > e.length:
            raise DomainError(f"offset {offset} outside edge {edge!r} of length {e.length}")
        if offset == 0:
            return self.vertex_point(e.u)
        if offset == e.length:
            return self.vertex_point(e.v)
        return GraphPoint(edge, offset)

    def vertex_point(self, v) -> GraphPoint:
        eid, off = self._designated[v]
        return GraphPoint(eid, off)

    def canonical(self, p: GraphPoint) -> GraphPoint:
        return self.point(p.edge, p.offset)

    def vertex_at(self, p: GraphPoint):
        """Vertex id if ``p`` is a vertex, else ``None``."""
        e = self.edges[p.edge]
        if p.offset == 0:
            return e.u
        if p.offset == e.length:
            return e.v
        return None

    def vertex_distance(self, a, b):
        return self._vdist[self.vertex_index[a]][self.vertex_index[b]]

    @property
    def diameter_bound(self):
        """Diameter of the whole graph (exact)."""
        return diameter(self, Subgraph.full(self))

    # -- vectorised metric for float states -----------------------------------
    def distance_array(self, e1, o1, e2, o2) -> np.ndarray:
        """Distances between float points given as edge-index / offset arrays."""
        e1 = np.asarray(e1, dtype=np.intp)
        e2 = np.asarray(e2, dtype=np.intp)
        o1 = np.asarray(o1, dtype=float)
        o2 = np.asarray(o2, dtype=float)
        L1, L2 = self._lengths_f[e1], self._lengths_f[e2]
        ends1 = ((self._u_idx[e1], o1), (self._v_idx[e1], L1 - o1))
        ends2 = ((self._u_idx[e2], o2), (self._v_idx[e2], L2 - o2))
        best = np.where(e1 == e2, np.abs(o1 - o2), np.inf)
        for a, da in ends1:
            for b, db in ends2:
                best = np.minimum(best, da + self._vdist_f[a, b] + db)
        return best

    def __repr__(self):
        return f"Graph(vertices={len(self.vertices)}, edges={len(self.edges)}, M={self.total_length})"


def unit_interval() -> Graph:
    return Graph(["a", "b"], [("e0", "a", "b", 1)])


def unit_circle() -> Graph:
    return Graph(["o"], [("e0", "o", "o", 1)])


def graph_from_dict(d: dict) -> Graph:
    if d == "unit_interval":
        return unit_interval()
    if d == "unit_circle":
        return unit_circle()
    try:
        vertices = d["vertices"]
        edges = [(e["id"], e["from"], e["to"], e["length"]) for e in d["edges"]]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed graph definition: {exc}") from exc
    return Graph(vertices, edges)


def graph_to_dict(g: Graph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "from": e.u, "to": e.v, "length": str(e.length)}
            for e in (g.edges[i] for i in g.edge_order)
        ],
    }


def load_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def distance(g: Graph, p: GraphPoint, q: GraphPoint):
    """Shortest-path arc length between two points of ``g``."""
    p, q = g.canonical(p), g.canonical(q)
    e1, e2 = g.edges[p.edge], g.edges[q.edge]
    best = abs(p.offset - q.offset) if p.edge == q.edge else None
    for a, da in ((e1.u, p.offset), (e1.v, e1.length - p.offset)):
        for b, db in ((e2.u, q.offset), (e2.v, e2.length - q.offset)):
            c = da + g.vertex_distance(a, b) + db
            if best is None or c < best:
                best = c
    return best


# ---------------------------------------------------------------------------
# Subgraphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgraph:
    """Normalised finite union of closed arcs ``(edge, a, b)`` of ``graph``.

    Build instances with :meth:`Subgraph.make`; arcs are sorted per edge,
    overlapping or touching arcs are merged, and degenerate arcs sitting on a
    vertex are stored on the vertex's designated edge.
    """

    graph: Graph = field(compare=False, repr=False)
    arcs: tuple = ()

    @classmethod
    def make(cls, g: Graph, arcs: Iterable[Sequence]) -> "Subgraph":
        return cls(g, _normalize(g, arcs))

    @classmethod
    def empty(cls, g: Graph) -> "Subgraph":
        return cls(g, ())

    @classmethod
    def full(cls, g: Graph) -> "Subgraph":
        return cls.make(g, [(e, 0, g.edges[e].length) for e in g.edge_order])

    @classmethod
    def from_point(cls, g: Graph, p: GraphPoint) -> "Subgraph":
        return cls.make(g, [(p.edge, p.offset, p.offset)])

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    def __bool__(self):
        return bool(self.arcs)

    def __len__(self):
        return len(self.arcs)

    def vertices(self) -> frozenset:
        """Vertices of the graph contained in this subgraph."""
        g = self.graph
        out = set()
        for eid, a, b in self.arcs:
            e = g.edges[eid]
            if a == 0:
                out.add(e.u)
            if b == e.length:
                out.add(e.v)
        return frozenset(out)

    def measure(self):
        return sum((b - a for _, a, b in self.arcs), Fraction(0))

    def on_edge(self, edge) -> list:
        return [(a, b) for e, a, b in self.arcs if e == edge]

    def contains_point(self, p: GraphPoint) -> bool:
        p = self.graph.canonical(p)
        v = self.graph.vertex_at(p)
        if v is not None:
            return v in self.vertices()
        return any(e == p.edge and a <= p.offset <= b for e, a, b in self.arcs)

    def union(self, other: "Subgraph") -> "Subgraph":
        return Subgraph.make(self.graph, self.arcs + other.arcs)

    def intersection(self, other: "Subgraph") -> "Subgraph":
        g = self.graph
        out = []
        by_edge = {}
        for e, a, b in other.arcs:
            by_edge.setdefault(e, []).append((a, b))
        for e, a, b in self.arcs:
            for c, d in by_edge.get(e, ()):
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    out.append((e, lo, hi))
        for v in self.vertices() & other.vertices():
            p = g.vertex_point(v)
            out.append((p.edge, p.offset, p.offset))
        return Subgraph.make(g, out)

    def contains(self, other: "Subgraph") -> bool:
        """True iff ``other`` is a subset of ``self`` (exact)."""
        mine = self.vertices()
        for e, a, b in other.arcs:
            if a == b:
                if not self.contains_point(GraphPoint(e, a)):
                    return False
                continue
            if not any(ee == e and c <= a and b <= d for ee, c, d in self.arcs):
                return False
        g = self.graph
        return all(v in mine for v in other.vertices()) or all(
            self.contains_point(g.vertex_point(v)) for v in other.vertices()
        )

    def components(self) -> list:
        """Connected components as a list of subgraphs."""
        g = self.graph
        n = len(self.arcs)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        at_vertex = {}
        for i, (eid, a, b) in enumerate(self.arcs):
            e = g.edges[eid]
            if a == 0:
                at_vertex.setdefault(e.u, []).append(i)
            if b == e.length:
                at_vertex.setdefault(e.v, []).append(i)
        for idxs in at_vertex.values():
            for j in idxs[1:]:
                parent[find(j)] = find(idxs[0])
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(self.arcs[i])
        return [Subgraph(g, tuple(v)) for _, v in sorted(groups.items())]

    def to_list(self) -> list:
        return [[e, str(a) if isinstance(a, Fraction) else a, str(b) if isinstance(b, Fraction) else b] for e, a, b in self.arcs]


def _normalize(g: Graph, arcs) -> tuple:
    per_edge: dict = {}
    vertex_pts = set()
    for arc in arcs:
        eid, a, b = arc
        if eid not in g.edges:
            raise DomainError(f"unknown edge {eid!r}")
        a, b = _num(a), _num(b)
        L = g.edges[eid].length
        if a > b:
            raise DomainError(f"arc ({a}, {b}) is reversed")
        if a < 0 or b > L:
            raise DomainError(f"arc ({a}, {b}) exceeds edge {eid!r}")
        if a == b:
            v = g.vertex_at(GraphPoint(eid, a))
            if v is not None:
                vertex_pts.add(v)
                continue
        per_edge.setdefault(eid, []).append((a, b))
    merged = {}
    for eid, ivs in per_edge.items():
        ivs.sort(key=lambda t: (t[0], t[1]))
        out = [list(ivs[0])]
        for a, b in ivs[1:]:
            if a <= out[-1][1]:
                if b > out[-1][1]:
                    out[-1][1] = b
            else:
                out.append([a, b])
        merged[eid] = out
    # Drop vertex points already covered by some arc.
    covered = set()
    for eid, ivs in merged.items():
        e = g.edges[eid]
        for a, b in ivs:
            if a == 0:
                covered.add(e.u)
            if b == e.length:
                covered.add(e.v)
    for v in vertex_pts - covered:
        p = g.vertex_point(v)
        merged.setdefault(p.edge, []).append([p.offset, p.offset])
        merged[p.edge].sort(key=lambda t: (t[0], t[1]))
    result = []
    for eid in g.edge_order:
        for a, b in merged.get(eid, ()):
            result.append((eid, a, b))
    return tuple(result)


def are_disjoint(s1: Subgraph, s2: Subgraph) -> bool:
    """True iff the closed point sets do not meet (shared vertices count)."""
    if s1.vertices() & s2.vertices():
        return False
    by_edge = {}
    for e, a, b in s2.arcs:
        by_edge.setdefault(e, []).append((a, b))
    for e, a, b in s1.arcs:
        for c, d in by_edge.get(e, ()):
            if max(a, c) <= min(b, d):
                return False
    return True


# ---------------------------------------------------------------------------
# Diameter
# ---------------------------------------------------------------------------


def _solve3(rows):
    # Cramer's rule on three rows (c_s, c_t, c_z, rhs); None when singular.
    (a1, b1, c1, d1), (a2, b2, c2, d2), (a3, b3, c3, d3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)
    if det == 0:
        return None
    ds = d1 * (b2 * c3 - b3 * c2) - b1 * (d2 * c3 - d3 * c2) + c1 * (d2 * b3 - d3 * b2)
    dt = a1 * (d2 * c3 - d3 * c2) - d1 * (a2 * c3 - a3 * c2) + c1 * (a2 * d3 - a3 * d2)
    dz = a1 * (b2 * d3 - b3 * d2) - b1 * (a2 * d3 - a3 * d2) + d1 * (a2 * b3 - a3 * b2)
    return ds / det, dt / det, dz / det


def _max_distance_between_arcs(g: Graph, arc1, arc2):
    """Exact max of d(p, q) for p on arc1, q on arc2.

    The distance is a minimum of affine functions of the two offsets (plus
    |s - t| on a shared edge, handled by splitting along s = t), so the
    maximum is an LP optimum; we enumerate the vertices of that LP.
    """
    e1id, a1, b1 = arc1
    e2id, a2, b2 = arc2
    e1, e2 = g.edges[e1id], g.edges[e2id]
    exact = all(isinstance(x, Fraction) for x in (a1, b1, a2, b2))
    one = Fraction(1) if exact else 1.0
    zero = 0 * one
    # affine pieces: z <= cs*s + ct*t + c0   <=>  -cs*s - ct*t + z <= c0
    affines = []
    for su, (cs, c0s) in ((e1.u, (one, zero)), (e1.v, (-one, e1.length * one))):
        for tv, (ct, c0t) in ((e2.u, (one, zero)), (e2.v, (-one, e2.length * one))):
            affines.append((cs, ct, c0s + c0t + g.vertex_distance(su, tv) * one))
    box = [
        (one, zero, zero, b1 * one),
        (-one, zero, zero, -a1 * one),
        (zero, one, zero, b2 * one),
        (zero, -one, zero, -a2 * one),
    ]
    regions = [[]]
    extra = [[]]
    if e1id == e2id:
        # region s >= t with z <= s - t, region s <= t with z <= t - s
        regions = [[(-one, one, zero, zero)], [(one, -one, zero, zero)]]
        extra = [[(one, -one, zero)], [(-one, one, zero)]]
    best = None
    for reg, ex in zip(regions, extra):
        cons = list(box) + reg
        cons += [(-cs, -ct, one, c0) for cs, ct, c0 in affines + ex]
        for rows in itertools.combinations(cons, 3):
            sol = _solve3(rows)
            if sol is None:
                continue
            s, t, z = sol
            tol = 0 if exact else 1e-12
            if all(cs * s + ct * t + cz * z <= rhs + tol for cs, ct, cz, rhs in cons):
                if best is None or z > best:
                    best = z
    return best


def diameter(g: Graph, s: Subgraph):
    """Maximum pairwise distance over the subgraph ``s`` (exact for arc unions)."""
    if s.is_empty:
        raise DomainError("diameter of an empty subgraph")
    if g.is_single_edge and not g.edges[g.edge_order[0]].is_loop:
        return max(b for _, _, b in s.arcs) - min(a for _, a, _ in s.arcs)
    best = None
    arcs = s.arcs
    for i in range(len(arcs)):
        for j in range(i, len(arcs)):
            d = _max_distance_between_arcs(g, arcs[i], arcs[j])
            if best is None or d > best:
                best = d
    return best


def ball(g: Graph, p: GraphPoint, r) -> Subgraph:
    """Closed ball ``{q : d(p, q) <= r}`` as a subgraph."""
    p = g.canonical(p)
    if r < 0:
        raise DomainError("negative radius")
    src = g.edges[p.edge]
    du = {}
    for vid in g.vertices:
        du[vid] = min(
            p.offset + g.vertex_distance(src.u, vid),
            src.length - p.offset + g.vertex_distance(src.v, vid),
        )
    arcs = []
    for eid in g.edge_order:
        e = g.edges[eid]
        if eid == p.edge:
            arcs.append((eid, max(0 * r, p.offset - r), min(e.length, p.offset + r)))
        if du[e.u] <= r:
            arcs.append((eid, 0 * r, min(e.length, r - du[e.u])))
        if du[e.v] <= r:
            arcs.append((eid, max(0 * r, e.length - (r - du[e.v])), e.length))
    return Subgraph.make(g, arcs)
