"""Catalogue of example systems with known dynamical behaviour.

Positive entropy: full tent, tents of slope > 1, the golden-mean Markov map.
Zero entropy: rotations, the identity, the period-doubling solenoid models,
the logistic map at the accumulation of period doubling, and the ladder
system built from an explicit slowly oscillating sequence.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .dynamics import LogisticMap, MapSystem, PLGraphMap, PLPiece
from .errors import DomainError
from .metric_graph import to_exact, unit_circle

__all__ = [
    "make",
    "names",
    "make_rotation",
    "make_tent",
    "make_full_tent",
    "make_logistic",
    "make_identity",
    "make_golden_mean",
    "make_feigenbaum_logistic",
    "feigenbaum_parameter",
    "superstable_parameters",
    "make_doubling_solenoid",
    "doubling_solenoid_knots",
    "LadderPoint",
    "LadderSystem",
    "make_paper_example",
    "ladder_height",
    "ladder_heights",
    "verify_paper_example_bounds",
]

GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0


def _tag(m, name, **params):
    m.spec = {"kind": "zoo", "name": name, "params": params}
    return m


def make_rotation(alpha) -> PLGraphMap:
    """Rotation ``x -> x + alpha (mod 1)`` of the unit circle."""
    a = to_exact(alpha)
    if not 0 <= a < 1:
        raise DomainError("rotation angle must lie in [0, 1)")
    g = unit_circle()
    e = g.edge_order[0]
    if a == 0:
        piece = PLPiece(e, Fraction(0), Fraction(1), ((e, 1),), Fraction(0), Fraction(1))
    else:
        piece = PLPiece(e, Fraction(0), Fraction(1), ((e, 1), (e, 1)), a, a)
    m = PLGraphMap(g, [piece], name=f"rotation({float(a):.10g})")
    m.alpha = a
    return _tag(m, "rotation", alpha=str(alpha) if isinstance(alpha, (Fraction, str)) else alpha)


def make_tent(s=2) -> PLGraphMap:
    """Symmetric tent ``x -> s * min(x, 1 - x)``, ``0 < s <= 2``."""
    s = to_exact(s)
    if not 0 < s <= 2:
        raise DomainError("tent slope must lie in (0, 2]")
    half = Fraction(1, 2)
    m = PLGraphMap.interval([(0, 0), (half, s / 2), (1, 0)], name=f"tent({s})")
    m.slope = s
    return _tag(m, "tent", s=str(s))


def make_full_tent() -> PLGraphMap:
    return _tag(make_tent(2).with_name("full_tent"), "full_tent")


def make_logistic(r) -> LogisticMap:
    if not 0 < float(r) <= 4:
        raise DomainError("logistic parameter must lie in (0, 4]")
    return _tag(LogisticMap(r), "logistic", r=float(r))


def make_identity() -> PLGraphMap:
    return _tag(PLGraphMap.interval([(0, 0), (1, 1)], name="identity"), "identity")


def make_golden_mean() -> PLGraphMap:
    """Markov map with cells [0,1/2] -> [0,1] and [1/2,1] -> [0,1/2]."""
    m = PLGraphMap.interval([(0, 1), (Fraction(1, 2), 0), (1, Fraction(1, 2))], name="golden_mean")
    return _tag(m, "golden_mean")


# ---------------------------------------------------------------------------
# Period doubling in the logistic family
# ---------------------------------------------------------------------------


def _superstable_residual(r, k):
    return _kernels.logistic_iterate(r, 0.5, 2 ** k) - 0.5


def _bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@functools.cache
def superstable_parameters(kmax: int = 14) -> tuple:
    """Parameters ``R_k`` where 1/2 lies on a superstable orbit of period 2^k."""
    R = [2.0, 1.0 + math.sqrt(5.0)]
    delta = 4.7
    for k in range(2, kmax + 1):
        step = (R[-1] - R[-2]) / delta
        lo, hi = R[-1] + 0.5 * step, R[-1] + 1.6 * step
        fn = functools.partial(_superstable_residual, k=k)
        while (fn(lo) < 0) == (fn(hi) < 0):
            lo, hi = R[-1] + 0.5 * (lo - R[-1]), R[-1] + 1.5 * (hi - R[-1])
        R.append(_bisect(fn, lo, hi))
        delta = (R[-2] - R[-3]) / (R[-1] - R[-2])
    return tuple(R)


@functools.cache
def feigenbaum_parameter(kmax: int = 14) -> float:
    """Accumulation point of the superstable parameters (Aitken-extrapolated)."""
    R = superstable_parameters(kmax)
    a, b, c = R[-3], R[-2], R[-1]
    denom = (c - b) - (b - a)
    return c - (c - b) ** 2 / denom


def make_feigenbaum_logistic() -> LogisticMap:
    m = LogisticMap(round(feigenbaum_parameter(), 12))
    m.name = "feigenbaum_logistic"
    return _tag(m, "feigenbaum_logistic")


# ---------------------------------------------------------------------------
# Finite-depth period-doubling solenoid model
# ---------------------------------------------------------------------------


def _double(knots):
    third = Fraction(1, 3)
    out = [(x * third, 1 - y * third) for x, y in knots]
    out += [(2 * third, third), (Fraction(1), Fraction(0))]
    return out


@functools.cache
def doubling_solenoid_knots(depth: int) -> tuple:
    """Knots of ``D^depth(0)`` where ``D`` renormalises a map into thirds.

    ``D(g)`` is ``1 - g(3x)/3`` on ``[0,1/3]``, slope -2 on the middle third
    and ``1 - x`` on ``[2/3,1]``, so ``[0,1/3]`` and ``[2/3,1]`` are swapped
    and the second iterate on ``[0,1/3]`` is conjugate to ``g``.
    """
    if depth < 0:
        raise DomainError("depth must be non-negative")
    knots = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))]
    for _ in range(depth):
        knots = _double(knots)
    return tuple(knots)


def make_doubling_solenoid(depth: int) -> PLGraphMap:
    """PL interval map with nested cycles of intervals of periods 2, 4, ..., 2^depth.

    The level-j cycle is generated by ``[0, 3^-j]``; ``expected_cycles``
    lists ``(period, base interval)`` for cross-checking.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    m = PLGraphMap.interval(doubling_solenoid_knots(depth), name=f"doubling_solenoid({depth})")
    m.depth = depth
    m.expected_cycles = [(2 ** j, (Fraction(0), Fraction(1, 3 ** j))) for j in range(1, depth + 1)]
    return _tag(m, "doubling_solenoid", depth=depth)


# ---------------------------------------------------------------------------
# Ladder system: a segment of fixed points approached by a single orbit
# ---------------------------------------------------------------------------


def ladder_height(n: int) -> Fraction:
    """Height of the n-th ladder rung (exact)."""
    if n < 1:
        raise DomainError("ladder index starts at 1")
    if n < 2 ** 10:
        return Fraction(0)
    k = n.bit_length() - 1
    top = 2 ** (k + 1)
    if n < top - 2 * k:
        return Fraction(0)
    if n < top - k:
        return Fraction(n - (top - 2 * k), k)
    return 1 - Fraction(n - (top - k), k)


def ladder_heights(n) -> np.ndarray:
    """Vectorised float heights for an integer array of indices."""
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape)
    big = n >= 2 ** 10
    if not big.any():
        return out
    nb = n[big]
    k = np.floor(np.log2(nb)).astype(np.int64)
    # guard against log2 rounding at powers of two
    k = np.where(2 ** (k + 1) <= nb, k + 1, k)
    k = np.where(2 ** k > nb, k - 1, k)
    top = 2 ** (k + 1)
    h = np.zeros(nb.shape)
    up = (nb >= top - 2 * k) & (nb < top - k)
    down = nb >= top - k
    h[up] = (nb[up] - (top[up] - 2 * k[up])) / k[up]
    h[down] = 1.0 - (nb[down] - (top[down] - k[down])) / k[down]
    out[big] = h
    return out


@dataclass(frozen=True)
class LadderPoint:
    """Either the segment point (0, a) (``index == 0``) or rung ``index >= 1``."""

    index: int
    a: Fraction = Fraction(0)

    @classmethod
    def segment(cls, a):
        a = to_exact(a)
        if not 0 <= a <= 1:
            raise DomainError("segment height must lie in [0, 1]")
        return cls(0, a)

    @classmethod
    def rung(cls, n: int):
        if n < 1:
            raise DomainError("ladder index starts at 1")
        return cls(int(n), ladder_height(int(n)))

    @property
    def coords(self):
        if self.index == 0:
            return (Fraction(0), self.a)
        return (Fraction(1, self.index), self.a)


class LadderSystem(MapSystem):
    """Segment ``{0} x [0,1]`` of fixed points plus rungs ``(1/n, a_n)`` shifted n -> n+1."""

    name = "paper_example"
    kernel = None

    def coerce(self, p):
        if not isinstance(p, LadderPoint):
            raise DomainError(f"{p!r} is not a ladder-system point")
        if p.index > 0 and p.a != ladder_height(p.index):
            raise DomainError("rung height does not match its index")
        return p

    def evaluate(self, p):
        p = self.coerce(p)
        if p.index == 0:
            return p
        return LadderPoint.rung(p.index + 1)

    def distance(self, p, q):
        (x1, y1), (x2, y2) = self.coerce(p).coords, self.coerce(q).coords
        return math.hypot(float(x1 - x2), float(y1 - y2))

    @property
    def diameter(self):
        return math.sqrt(2.0)

    # float states: rows (index, height)
    def to_states(self, points):
        return np.array([[p.index, float(p.a)] for p in map(self.coerce, points)], dtype=float)

    def float_step(self, S):
        S = np.array(S, dtype=float)
        moving = S[:, 0] > 0
        S[moving, 0] += 1
        S[moving, 1] = ladder_heights(S[moving, 0].astype(np.int64))
        return S

    def _xy(self, S):
        S = np.asarray(S, dtype=float)
        idx = S[..., 0]
        x = np.where(idx > 0, 1.0 / np.where(idx > 0, idx, 1.0), 0.0)
        return x, S[..., 1]

    def float_dist(self, A, B):
        xa, ya = self._xy(A)
        xb, yb = self._xy(B)
        return np.hypot(xa - xb, ya - yb)

    def float_orbit(self, p, n):
        p = self.coerce(p)
        if p.index == 0:
            return np.tile([0.0, float(p.a)], (n, 1))
        idx = np.arange(p.index, p.index + n, dtype=np.int64)
        return np.column_stack([idx.astype(float), ladder_heights(idx)])

    def sample_states(self, rng, n):
        on_seg = rng.random(n) < 0.5
        idx = np.where(on_seg, 0, rng.integers(1, 2 ** 14, n))
        h = np.where(on_seg, rng.random(n), ladder_heights(np.maximum(idx, 1)))
        return np.column_stack([idx.astype(float), h])

    def perturb_states(self, S, radius, rng):
        # stay on the same kind of point: segment heights move, rungs move to nearby rungs
        S = np.array(S, dtype=float)
        seg = S[:, 0] == 0
        S[seg, 1] = np.clip(S[seg, 1] + rng.uniform(-radius, radius, seg.sum()), 0.0, 1.0)
        return S

    def state_coordinate(self, S):
        return np.asarray(S, dtype=float)[..., 1]


def make_paper_example() -> LadderSystem:
    return _tag(LadderSystem(), "paper_example")


def _nonzero_count_below(limit: int) -> int:
    n = np.arange(1, limit, dtype=np.int64)
    return int(np.count_nonzero(ladder_heights(n)))


def verify_paper_example_bounds(
    k_counts=range(10, 19),
    k_averages=range(12, 19),
    witness_N: int = 10 ** 6,
) -> dict:
    """Exact checks of the ladder sequence's sparsity and averaging bounds.

    * for each k, the number of nonzero heights below any ``j < 2^(k+1)``
      is at most ``2(k+1)^2`` (checked at the largest such ``j``);
    * the average distance from rung 1 to the corner (0, 0) over ``2^k``
      steps is at most ``2(k+1)^2 / 2^k``;
    * a rung within 0.01 of the segment point (0, 1/2) stays far from it
      on average.
    """
    counts = []
    for k in k_counts:
        c = _nonzero_count_below(2 ** (k + 1) - 1)
        bound = 2 * (k + 1) ** 2
        # block j holds 2j - 1 nonzero heights; its last one sits at index 2^(j+1) - 1, not below it
        closed = sum(2 * j - 1 for j in range(10, k + 1)) - 1
        counts.append({"k": k, "count": c, "closed_form": closed, "bound": bound, "ok": c <= bound})
    avgs = []
    for k in k_averages:
        N = 2 ** k
        n = np.arange(1, N + 1, dtype=np.int64)
        d = np.hypot(1.0 / n, ladder_heights(n))
        avg = float(d.sum() / N)
        env = 2 * (k + 1) ** 2 / 2 ** k
        avgs.append({"k": k, "N": N, "average": avg, "envelope": env, "ok": avg <= env})
    # first rung of height exactly 1/2 at distance <= 0.01 from the segment
    n0 = next(n for n in range(100, 2 ** 16) if ladder_height(n) == Fraction(1, 2))
    u = LadderPoint.segment(Fraction(1, 2))
    v = LadderPoint.rung(n0)
    sysm = LadderSystem()
    d0 = sysm.distance(u, v)
    idx = np.arange(n0, n0 + witness_N, dtype=np.int64)
    dist = np.hypot(1.0 / idx, ladder_heights(idx) - 0.5)
    mean = float(dist.mean())
    witness = {"u": [0.0, 0.5], "v_index": n0, "d_uv": d0, "N": witness_N, "mean_distance": mean,
               "ok": d0 <= 0.01 and mean >= 0.4}
    # continuity premise |a_n - a_{n+1}| < 1/n, reported rather than asserted
    n = np.arange(1, 2 ** 20, dtype=np.int64)
    jumps = np.abs(np.diff(ladder_heights(np.append(n, n[-1] + 1))))
    bad = np.nonzero(jumps >= 1.0 / n)[0]
    premise = {"checked_up_to": int(n[-1]), "violations": int(bad.size),
               "first_violation": int(n[bad[0]]) if bad.size else None,
               "max_jump_times_n": float((jumps * n).max())}
    ok = all(c["ok"] for c in counts) and all(a["ok"] for a in avgs) and witness["ok"]
    return {"counts": counts, "averages": avgs, "witness": witness, "step_premise": premise, "ok": ok}


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_REGISTRY = {
    "full_tent": lambda: make_full_tent(),
    "tent": lambda s=2: make_tent(s),
    "tent_1.5": lambda: make_tent(Fraction(3, 2)),
    "rotation": lambda alpha=GOLDEN_FRAC: make_rotation(alpha),
    "golden_rotation": lambda: make_rotation(GOLDEN_FRAC),
    "logistic": lambda r=4.0: make_logistic(r),
    "feigenbaum_logistic": lambda: make_feigenbaum_logistic(),
    "doubling_solenoid": lambda depth=6: make_doubling_solenoid(int(depth)),
    "identity": lambda: make_identity(),
    "golden_mean": lambda: make_golden_mean(),
    "paper_example": lambda: make_paper_example(),
}


def names() -> list:
    return sorted(_REGISTRY)


def make(name: str, **params) -> MapSystem:
    if name not in _REGISTRY:
        raise DomainError(f"unknown zoo system {name!r}; known: {', '.join(names())}")
    return _REGISTRY[name](**params)
