from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from graphdyn import DomainError, Subgraph, UnsupportedError, are_disjoint, image, zoo
from graphdyn.structure import (
    CycleOfGraphs,
    detect_cycles,
    diameter_average_check,
    omega_limit_approx,
    solenoid_certificate,
    solenoid_search,
)

F = Fraction


def test_omega_examples():
    tent = zoo.make_full_tent()
    assert len(omega_limit_approx(tent, 0.0, 1000, 10, 0.01)) == 1
    net = omega_limit_approx(zoo.make_rotation(zoo.GOLDEN_FRAC), 0.0, 10 ** 5, 100, 0.01)
    assert len(net) >= 1 / (2 * 0.01)
    net = omega_limit_approx(zoo.make_logistic(3.2), 0.3, 5000, 4000, 1e-6)
    assert len(net) == 2
    with pytest.raises(DomainError):
        omega_limit_approx(tent, 0.1, 10, 10, 0.1)


def test_detect_cycles_solenoid():
    cyc = detect_cycles(zoo.make_doubling_solenoid(5), 32)
    assert sorted({c.period for c in cyc}) == [1, 2, 4, 8, 16, 32]


def test_detect_cycles_trivial_maps():
    assert {c.period for c in detect_cycles(zoo.make_full_tent(), 8)} == {1}
    assert {c.period for c in detect_cycles(zoo.make_identity(), 4)} == {1}


def test_detect_cycles_rotation_unsupported():
    with pytest.raises(UnsupportedError, match="partition"):
        detect_cycles(zoo.make_rotation(zoo.GOLDEN_FRAC), 4)


def test_detect_cycles_analytic_needs_partition():
    m = zoo.make_logistic(3.2)
    with pytest.raises(UnsupportedError):
        detect_cycles(m, 2)
    part = [0.0, 0.46, 0.56, 0.78, 0.82, 1.0]  # brackets the attracting 2-cycle near 0.513, 0.799
    cyc = [c for c in detect_cycles(m, 2, partition=part) if c.period == 2]
    assert cyc and all(c.certified for c in cyc)


def test_solenoid_certificates():
    cert = solenoid_certificate(zoo.make_doubling_solenoid(6), F(1234, 10000), 6)
    assert cert is not None and cert.periods == (2, 4, 8, 16, 32, 64) and cert.valid
    assert solenoid_certificate(zoo.make_full_tent(), F(1, 7), 3) is None
    s = solenoid_search(zoo.make_identity(), F(1, 3), 3)
    assert s.certificate is None and s.depth_reached == 0


def test_solenoid_nesting_exact():
    cert = solenoid_certificate(zoo.make_doubling_solenoid(5), F(1234, 10000), 5)
    for outer, inner in zip(cert.levels, cert.levels[1:]):
        assert inner.period % outer.period == 0
        for Y in inner.components:
            assert sum(X.contains(Y) for X in outer.components) == 1
        per = [sum(X.contains(Y) for Y in inner.components) for X in outer.components]
        assert set(per) == {inner.period // outer.period}


def test_diameter_check_examples():
    m = zoo.make_full_tent()
    whole = CycleOfGraphs(1, [Subgraph.full(m.graph)]).certify(m)
    r = diameter_average_check(m, whole, 100, F(1, 2))
    assert r.lhs <= 1 and r.rhs == pytest.approx(0.5 + (100 + 1) * 2 / 100)
    assert r.passed
    sol = zoo.make_doubling_solenoid(5)
    c32 = [c for c in detect_cycles(sol, 32) if c.period == 32][0]
    r = diameter_average_check(sol, c32, 10 ** 4, F(1, 10))
    assert r.passed and r.count_ok


def _recheck(m, cyc):
    comps = cyc.components
    assert all(are_disjoint(a, b) for a, b in combinations(comps, 2))
    for i, X in enumerate(comps):
        assert comps[(i + 1) % cyc.period].contains(image(m, X))


@settings(max_examples=12)
@given(st.sampled_from([zoo.make_doubling_solenoid(4), zoo.make_tent(F(3, 2)), zoo.make_golden_mean(),
                        zoo.make_full_tent(), zoo.make_tent(F(6, 5))]),
       st.integers(1, 16), st.fractions(F(1, 50), F(1, 2)))
def test_cycles_recertify_and_satisfy_diameter_bound(m, kmax, eps):
    for cyc in detect_cycles(m, kmax):
        _recheck(m, cyc)
        r = diameter_average_check(m, cyc, 500, eps)
        assert r.passed and r.count_ok
