import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphdyn import DomainError, Subgraph, zoo
from graphdyn.birkhoff import (
    banach_density_lower,
    classify_pair,
    mean_distance,
    mean_equicontinuity_modulus,
    mean_sensitivity_constant,
)
from graphdyn.chaos import find_scrambled_tuples

ROT = zoo.make_rotation(zoo.GOLDEN_FRAC)
TENT = zoo.make_full_tent()
SOL6 = zoo.make_doubling_solenoid(6)


def test_mean_distance_examples():
    assert mean_distance(TENT, 0.3, 0.3, 1000) == 0
    assert mean_distance(TENT, 0.1, 0.1 + 1e-6, 10 ** 4) > 0.1


def test_modulus_rotation_accepts_eps():
    rep = mean_equicontinuity_modulus(ROT, None, 0.1, 200, 1000, seed=0, deltas=(0.1,))
    assert rep.delta == 0.1


def test_modulus_tent_rejects_every_delta():
    rep = mean_equicontinuity_modulus(TENT, None, 0.1, 200, 10 ** 4, seed=0)
    assert rep.delta is None
    assert min(d for d, *_ in rep.tested) <= 1e-6
    assert rep.witness is not None and rep.witness[3] >= 0.1


def test_modulus_solenoid_accepts_some_delta():
    rep = mean_equicontinuity_modulus(SOL6, None, 0.1, 200, 10 ** 5, seed=0)
    assert rep.delta is not None and rep.delta > 0


def test_modulus_empty_region():
    with pytest.raises(DomainError):
        mean_equicontinuity_modulus(TENT, Subgraph.empty(TENT.graph), 0.1, 10, 100)


def test_sensitivity_constants():
    assert mean_sensitivity_constant(TENT, 100, 10, 10 ** 4, seed=0)[0] >= 0.2
    est, (x, y) = mean_sensitivity_constant(ROT, 50, 10, 1000, seed=0, radius=1e-3)
    assert est <= 1e-3 + 1e-12
    assert mean_sensitivity_constant(zoo.make_identity(), 20, 5, 100, radius=0.0)[0] == 0


def test_classify_pair_examples():
    assert classify_pair(TENT, 0.4, 0.4, 1000).asymptotic
    r = classify_pair(ROT, 0.1, 0.3, 10 ** 4)
    assert not r.proximal and not r.asymptotic
    pair = find_scrambled_tuples(TENT, 2, 100, 10 ** 5, seed=0)[0].points
    assert classify_pair(TENT, float(pair[0]), float(pair[1]), 10 ** 5).scrambled


def test_banach_examples():
    assert banach_density_lower(TENT, 0.2, 0.2, 0.05, 1000, 100)[0] == 1.0
    assert banach_density_lower(ROT, 0.1, 0.4, 0.05, 1000, 100)[0] == 0.0
    x, y = 0.1234, 0.1234 + 1e-4
    assert classify_pair(SOL6, x, y, 10 ** 5).proximal
    assert banach_density_lower(SOL6, x, y, 0.05, 10 ** 5, 1000)[0] >= 0.9


def test_banach_bad_window():
    with pytest.raises(DomainError):
        banach_density_lower(TENT, 0.1, 0.2, 0.05, 100, 200)


# -- properties ---------------------------------------------------------------

pts = st.floats(0, 1)
systems = st.sampled_from([TENT, zoo.make_logistic(3.9), SOL6])


@given(systems, pts, pts, pts)
def test_mean_distance_is_a_pseudometric(m, x, y, z):
    N = 500
    dxy = mean_distance(m, x, y, N)
    assert dxy == pytest.approx(mean_distance(m, y, x, N), abs=1e-15)
    assert mean_distance(m, x, z, N) <= dxy + mean_distance(m, y, z, N) + 1e-12
    assert 0 <= dxy <= 1


@given(st.floats(0, 0.999), st.floats(0, 0.999), st.integers(1, 3000))
def test_isometry_mean_equals_distance(x, y, N):
    d = float(ROT.float_dist(np.array([x]), np.array([y]))[0])
    assert mean_distance(ROT, x, y, N) == pytest.approx(d, abs=1e-12)


@given(systems, pts, pts)
def test_proxy_ordering(m, x, y):
    r = classify_pair(m, x, y, 400)
    assert 0 <= r.liminf_proxy <= r.limsup_proxy <= 1


@settings(max_examples=30)
@given(systems, pts, pts, st.integers(1, 100), st.integers(1, 5), st.floats(0.01, 0.5), st.floats(0.01, 0.5))
def test_banach_monotone(m, x, y, L, k, e1, e2):
    # a window of length kL averages k windows of length L, so its minimum cannot be smaller;
    # between non-multiples there is no order (hits 011011... give 2/3 at L=3, 1/2 at L=4)
    N = 1000
    lo_e, hi_e = sorted((e1, e2))
    assert banach_density_lower(m, x, y, lo_e, N, k * L)[0] >= banach_density_lower(m, x, y, lo_e, N, L)[0]
    assert banach_density_lower(m, x, y, hi_e, N, L)[0] >= banach_density_lower(m, x, y, lo_e, N, L)[0]
