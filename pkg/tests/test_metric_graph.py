import heapq
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphdyn import DomainError, Graph, Subgraph, are_disjoint, ball, diameter, distance, unit_circle, unit_interval

F = Fraction


def y_tree():
    return Graph(["c", "l1", "l2", "l3"], [("e1", "c", "l1", 1), ("e2", "c", "l2", 1), ("e3", "c", "l3", 1)])


def theta():
    # two vertices joined by three edges of different lengths
    return Graph(["p", "q"], [("a", "p", "q", 1), ("b", "p", "q", F(3, 2)), ("c", "q", "p", F(1, 2))])


def _subdivided_distance(g, p, q, steps=60):
    """Dijkstra on a fine subdivision: independent shortest-path oracle."""
    nodes = {}
    adj = {}

    def node(key):
        return nodes.setdefault(key, len(nodes))

    def link(u, v, w):
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, w))

    for eid in g.edge_order:
        e = g.edges[eid]
        cuts = sorted({F(i, steps) * e.length for i in range(steps + 1)}
                      | {pt.offset for pt in (p, q) if pt.edge == eid})
        ids = []
        for c in cuts:
            if c == 0:
                ids.append(node(("v", e.u)))
            elif c == e.length:
                ids.append(node(("v", e.v)))
            else:
                ids.append(node((eid, c)))
        for i in range(len(cuts) - 1):
            link(ids[i], ids[i + 1], cuts[i + 1] - cuts[i])

    def key(pt):
        e = g.edges[pt.edge]
        if pt.offset == 0:
            return ("v", e.u)
        if pt.offset == e.length:
            return ("v", e.v)
        return (pt.edge, pt.offset)

    src, dst = nodes[key(p)], nodes[key(q)]
    best = {src: F(0)}
    heap = [(F(0), src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == dst:
            return d
        if d > best[u]:
            continue
        for v, w in adj[u]:
            if d + w < best.get(v, d + w + 1):
                best[v] = d + w
                heapq.heappush(heap, (d + w, v))
    raise AssertionError("disconnected")


def test_distance_examples():
    g = unit_interval()
    assert distance(g, g.point("e0", F(1, 5)), g.point("e0", F(7, 10))) == F(1, 2)
    c = unit_circle()
    assert distance(c, c.point("e0", F(1, 10)), c.point("e0", F(9, 10))) == F(1, 5)
    y = y_tree()
    assert distance(y, y.point("e1", 1), y.point("e2", 1)) == 2


def test_distance_matches_subdivision_oracle():
    for g in (y_tree(), theta()):
        pts = [g.point(e, F(k, 7) * g.edges[e].length) for e in g.edge_order for k in (0, 2, 5, 7)]
        for p in pts:
            for q in pts:
                assert distance(g, p, q) == _subdivided_distance(g, p, q)


def test_distance_errors():
    g = unit_interval()
    with pytest.raises(DomainError):
        g.point("nope", 0)
    with pytest.raises(DomainError):
        g.point("e0", F(3, 2))


def test_graph_validation():
    with pytest.raises(DomainError):
        Graph(["a", "b"], [("e", "a", "b", 0)])
    with pytest.raises(DomainError):
        Graph(["a", "b", "c"], [("e", "a", "b", 1)])  # disconnected
    g = theta()
    assert g.total_length == 3


def test_vertex_points_compare_equal():
    g = y_tree()
    assert g.canonical(g.point("e1", 0)) == g.canonical(g.point("e3", 0))


def test_diameter_examples():
    g = unit_interval()
    assert diameter(g, Subgraph.full(g)) == 1
    assert diameter(g, Subgraph.make(g, [("e0", F(1, 3), F(1, 3))])) == 0
    c = unit_circle()
    s = Subgraph.make(c, [("e0", 0, F(1, 10)), ("e0", F(9, 10), 1)])
    assert diameter(c, s) == F(1, 5)
    with pytest.raises(DomainError):
        diameter(g, Subgraph.empty(g))


def test_diameter_matches_endpoint_grid():
    c = unit_circle()
    s = Subgraph.make(c, [("e0", 0, F(1, 10)), ("e0", F(9, 10), 1)])
    grid = [F(k, 100) for k in range(0, 11)] + [F(k, 100) for k in range(90, 101)]
    brute = max(distance(c, c.point("e0", a), c.point("e0", b)) for a in grid for b in grid)
    assert diameter(c, s) == brute


def test_disjointness_examples():
    g = unit_interval()
    assert are_disjoint(Subgraph.make(g, [("e0", 0, F(2, 5))]), Subgraph.make(g, [("e0", F(3, 5), 1)]))
    assert not are_disjoint(Subgraph.make(g, [("e0", 0, F(1, 2))]), Subgraph.make(g, [("e0", F(1, 2), 1)]))
    y = y_tree()
    # arcs on different edges sharing only the center vertex
    assert not are_disjoint(Subgraph.make(y, [("e1", 0, F(1, 2))]), Subgraph.make(y, [("e2", 0, F(1, 4))]))
    assert are_disjoint(Subgraph.make(y, [("e1", F(1, 10), F(1, 2))]), Subgraph.make(y, [("e2", 0, F(1, 4))]))


def test_ball_wraps_on_circle():
    c = unit_circle()
    b = ball(c, c.point("e0", F(1, 20)), F(1, 10))
    assert b.contains_point(c.point("e0", F(19, 20)))
    assert b.measure() == F(1, 5)


# -- properties ---------------------------------------------------------------

offsets = st.fractions(min_value=0, max_value=1, max_denominator=50)
edges3 = st.sampled_from(["e1", "e2", "e3"])


@given(st.tuples(edges3, offsets), st.tuples(edges3, offsets), st.tuples(edges3, offsets))
def test_metric_axioms(a, b, c):
    g = y_tree()
    p, q, r = (g.point(*t) for t in (a, b, c))
    dpq = distance(g, p, q)
    assert dpq >= 0
    assert dpq == distance(g, q, p)
    assert (dpq == 0) == (g.canonical(p) == g.canonical(q))
    assert distance(g, p, r) <= dpq + distance(g, q, r)


arcs = st.lists(st.tuples(edges3, offsets, offsets).map(lambda t: (t[0], min(t[1:]), max(t[1:]))), max_size=6)


@given(arcs, st.randoms(use_true_random=False))
def test_normalization_idempotent_and_order_insensitive(arc_list, rnd):
    g = y_tree()
    s = Subgraph.make(g, arc_list)
    shuffled = list(arc_list)
    rnd.shuffle(shuffled)
    assert Subgraph.make(g, shuffled) == s
    assert Subgraph.make(g, s.arcs) == s
    for (e1, a1, b1), (e2, a2, b2) in zip(s.arcs, s.arcs[1:]):
        if e1 == e2:
            assert b1 < a2


@settings(max_examples=20)
@given(st.lists(st.tuples(offsets, offsets), min_size=1, max_size=6), st.fractions(min_value=F(1, 100), max_value=1))
def test_large_component_count_bound(cuts, eps):
    # pieces with pairwise disjoint interiors: consecutive cells of a sorted cut list
    g = y_tree()
    pts = sorted({c for pair in cuts for c in pair} | {F(0), F(1)})
    pieces = [Subgraph.make(g, [(e, a, b)]) for e in ("e1", "e2", "e3") for a, b in zip(pts, pts[1:])]
    big = sum(1 for s in pieces if diameter(g, s) >= eps)
    assert big <= g.total_length / eps
