import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphdyn import (
    DomainError,
    Graph,
    NotMarkovError,
    PLGraphMap,
    PLPiece,
    Subgraph,
    image,
    map_from_dict,
    map_to_dict,
    markov_matrix,
    orbit,
    preimage,
    zoo,
)
from graphdyn.dynamics import restricted_preimage

F = Fraction


def test_evaluate_examples(tent):
    assert zoo.make_rotation(F(1, 4)).evaluate(F(1, 2)) == F(3, 4)
    assert tent.evaluate(F(1, 4)) == F(1, 2)
    assert tent.evaluate(F(3, 4)) == F(1, 2)
    assert zoo.make_logistic(4).evaluate(0.5) == pytest.approx(1.0)


def test_evaluate_outside_domain(tent):
    with pytest.raises(DomainError):
        tent.evaluate(F(3, 2))


def test_orbit_examples(tent):
    assert orbit(zoo.make_rotation(F(1, 4)), F(0), 4).points == (0, F(1, 4), F(1, 2), F(3, 4))
    assert orbit(tent, F(2, 7), 3).points == (F(2, 7), F(4, 7), F(6, 7))
    assert set(orbit(tent, F(2, 3), 10).points) == {F(2, 3)}


def test_preimage_examples(tent):
    g = tent.graph
    assert preimage(tent, [(0, 1)]) == Subgraph.full(g)
    assert preimage(tent, [(0, F(1, 2))]).arcs == (("e0", 0, F(1, 4)), ("e0", F(3, 4), 1))
    rot = zoo.make_rotation(F(3, 10))
    assert preimage(rot, [(F(1, 2), F(7, 10))]).arcs == (("e0", F(1, 5), F(2, 5)),)


def test_markov_matrices(tent):
    assert markov_matrix(tent).tolist() == [[1, 1], [1, 1]]
    assert markov_matrix(zoo.make_golden_mean()).tolist() == [[1, 1], [1, 0]]
    with pytest.raises(NotMarkovError):
        markov_matrix(zoo.make_rotation(zoo.GOLDEN_FRAC))


def test_non_markov_error_names_piece():
    m = PLGraphMap.interval([(0, 0), (F(1, 2), F(2, 3)), (1, 0)])  # critical value 2/3 is not a breakpoint
    with pytest.raises(NotMarkovError) as exc:
        markov_matrix(m)
    assert exc.value.piece is not None


def test_continuity_checked_at_construction():
    g = Graph(["a", "b"], [("e", "a", "b", 1)])
    pieces = [
        PLPiece("e", F(0), F(1, 2), (("e", 1),), F(0), F(1, 2)),
        PLPiece("e", F(1, 2), F(1), (("e", 1),), F(3, 4), F(1)),  # jump at 1/2
    ]
    with pytest.raises(DomainError):
        PLGraphMap(g, pieces)


def test_map_on_y_tree_permutes_leaves():
    # rotate the three legs of a star: exact evaluation across edges
    g = Graph(["c", "l1", "l2", "l3"], [("e1", "c", "l1", 1), ("e2", "c", "l2", 1), ("e3", "c", "l3", 1)])
    nxt = {"e1": "e2", "e2": "e3", "e3": "e1"}
    m = PLGraphMap(g, [PLPiece(e, F(0), F(1), ((nxt[e], 1),), F(0), F(1)) for e in g.edge_order])
    p = g.point("e1", F(1, 3))
    q = m.evaluate(m.evaluate(m.evaluate(p)))
    assert g.canonical(q) == g.canonical(p)
    assert image(m, Subgraph.make(g, [("e1", 0, F(1, 2))])).arcs == (("e2", 0, F(1, 2)),)


def test_json_round_trip():
    for m in (zoo.make_doubling_solenoid(3), zoo.make_tent(F(3, 2)), zoo.make_rotation(F(1, 5))):
        d = json.loads(json.dumps(map_to_dict(m)))
        m2 = map_from_dict(d)
        for k in range(11):
            x = F(k, 10)
            assert m2.evaluate(x) == m.evaluate(x)


def test_float_simulation_matches_exact(tent):
    m = zoo.make_doubling_solenoid(4)
    xs = [F(k, 37) for k in range(37)]
    S = m.to_states(xs)
    exact = [m.evaluate(x) for x in xs]
    got = m.state_coordinate(m.float_step(S))
    assert np.allclose(got, [float(v) for v in exact], atol=1e-12)


def test_restricted_preimage_is_a_subset(tent):
    D = [(0, F(1, 2))]
    A = [(F(1, 3), F(2, 3))]
    R = restricted_preimage(tent, D, A, 3)
    for _, a, b in R.arcs:
        for x in (a, b, (a + b) / 2):
            y = x
            for _ in range(3):
                y = tent.evaluate(y)
            assert F(1, 3) <= y <= F(2, 3) and x <= F(1, 2)


# -- properties ---------------------------------------------------------------

unit = st.fractions(min_value=0, max_value=1, max_denominator=200)
pl_maps = st.sampled_from([zoo.make_full_tent(), zoo.make_tent(F(3, 2)), zoo.make_doubling_solenoid(3),
                           zoo.make_golden_mean(), zoo.make_rotation(F(2, 7))])


@given(pl_maps, unit, unit, unit)
def test_preimage_iff_evaluate(m, a, b, q):
    a, b = min(a, b), max(a, b)
    g = m.graph
    P = preimage(m, [(a, b)])
    A = Subgraph.make(g, [("e0", a, b)])
    assert P.contains_point(g.point("e0", q)) == A.contains_point(g.point("e0", m.evaluate(q)))


@given(pl_maps, unit, st.integers(1, 30))
def test_orbit_extends_by_one_step(m, p, n):
    o1 = orbit(m, p, n)
    o2 = orbit(m, p, n + 1)
    assert o2.points[:n] == o1.points
    assert o2.points[n] == m.evaluate(o1.points[-1])
