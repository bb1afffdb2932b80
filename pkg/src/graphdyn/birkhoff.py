"""Finite-horizon estimators built from orbit distances.

All window statistics use the late window ``[N//2, N)``: its minimum stands
in for a liminf and its maximum for a limsup.  Every estimator returns the
pair or time that realises its value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rng import rng_for
from .dynamics import MapSystem
from .errors import DomainError
from .metric_graph import Subgraph

__all__ = [
    "TupleStats",
    "tuple_statistics",
    "mean_distance",
    "PairReport",
    "classify_pair",
    "ModulusReport",
    "mean_equicontinuity_modulus",
    "mean_sensitivity_constant",
    "banach_density_lower",
    "DEFAULT_DELTAS",
]

DEFAULT_DELTAS = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5, 5e-6, 2e-6, 1e-6)


@dataclass
class TupleStats:
    mean: np.ndarray  # (T, pairs)
    wmin: np.ndarray
    wmax: np.ndarray
    closeness: np.ndarray  # (T,)
    separation: np.ndarray
    window: tuple


def tuple_statistics(m: MapSystem, S: np.ndarray, N: int, pins=None) -> TupleStats:
    """Pair statistics for tuples of states ``S`` with shape (T, q, ...).

    ``pins`` optionally is ``(pin_idx, table, period)``: coordinates with
    ``pin_idx >= 0`` follow a stored periodic orbit instead of the float map.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    S = np.asarray(S)
    T, q = S.shape[:2]
    w0 = N // 2
    if m.kernel is not None:
        kind, px, py, ps, par = m.kernel
        if pins is None:
            pin_idx = np.full((T, q), -1, dtype=np.int64)
            table = np.zeros((1, 1))
            period = np.ones(1, dtype=np.int64)
        else:
            pin_idx, table, period = pins
        out = _kernels.tuple_stats(kind, S.astype(float), int(N), w0, px, py, ps, par,
                                   np.asarray(pin_idx, dtype=np.int64), np.asarray(table, dtype=float),
                                   np.asarray(period, dtype=np.int64))
        return TupleStats(*out, window=(w0, N))
    pairs = [(i, j) for i in range(q) for j in range(i + 1, q)]
    mean = np.zeros((T, len(pairs)))
    wmin = np.full((T, len(pairs)), np.inf)
    wmax = np.zeros((T, len(pairs)))
    close = np.full(T, np.inf)
    sep = np.zeros(T)
    cur = [S[:, i] for i in range(q)]
    for k in range(N):
        D = np.column_stack([m.float_dist(cur[i], cur[j]) for i, j in pairs])
        mean += D
        if k >= w0:
            np.minimum(wmin, D, out=wmin)
            np.maximum(wmax, D, out=wmax)
            np.minimum(close, D.max(axis=1), out=close)
            np.maximum(sep, D.min(axis=1), out=sep)
        cur = [m.float_step(c) for c in cur]
    return TupleStats(mean / N, wmin, wmax, close, sep, window=(w0, N))


def _pair_states(m, x, y):
    return np.stack([m.to_states([x]), m.to_states([y])], axis=1)


def mean_distance(m: MapSystem, x, y, N: int) -> float:
    """``(1/N) sum_{k<N} d(f^k x, f^k y)`` along float orbits."""
    return float(tuple_statistics(m, _pair_states(m, x, y), N).mean[0, 0])


@dataclass
class PairReport:
    x: object
    y: object
    N: int
    mean_distance: float
    liminf_proxy: float
    limsup_proxy: float
    banach_lower: float | None
    eps_prox: float
    eps_dist: float
    window: tuple

    @property
    def proximal(self) -> bool:
        return self.liminf_proxy < self.eps_prox

    @property
    def asymptotic(self) -> bool:
        return self.limsup_proxy < self.eps_prox

    @property
    def scrambled(self) -> bool:
        return self.liminf_proxy < self.eps_prox and self.limsup_proxy > self.eps_dist

    def verdicts(self) -> dict:
        return {"proximal": self.proximal, "asymptotic": self.asymptotic, "scrambled": self.scrambled}


def classify_pair(m: MapSystem, x, y, N: int, eps_prox: float = 0.01, eps_dist: float = 0.1,
                  banach_L: int | None = None) -> PairReport:
    if N < 4:
        raise DomainError("horizon must be at least 4")
    if not eps_prox < eps_dist:
        raise DomainError("eps_prox must be below eps_dist")
    st = tuple_statistics(m, _pair_states(m, x, y), N)
    bl = None
    if banach_L is not None:
        bl = banach_density_lower(m, x, y, eps_prox, N, banach_L)[0]
    return PairReport(x, y, N, float(st.mean[0, 0]), float(st.wmin[0, 0]), float(st.wmax[0, 0]), bl,
                      eps_prox, eps_dist, st.window)


def _region_states(m: MapSystem, region: Subgraph | None, rng, n: int) -> np.ndarray:
    """Stratified uniform samples over the arcs of ``region``."""
    if region is None:
        return m.sample_states(rng, n)
    if region.is_empty:
        raise DomainError("empty region")
    g = m.graph
    arcs = region.arcs
    lengths = np.array([float(b - a) for _, a, b in arcs])
    if lengths.sum() == 0:
        lengths = np.ones(len(arcs))
    counts = np.floor(n * lengths / lengths.sum()).astype(int)
    for i in np.argsort(-lengths)[: n - counts.sum()]:
        counts[i] += 1
    rows = []
    for (e, a, b), c in zip(arcs, counts):
        off = rng.uniform(float(a), float(b), c)
        if g.is_single_edge:
            rows.append(off)
        else:
            rows.append(np.column_stack([np.full(c, g.edge_index[e], dtype=float), off]))
    return np.concatenate(rows)


@dataclass
class ModulusReport:
    delta: float | None
    eps: float
    N: int
    tested: list = field(default_factory=list)  # (delta, worst mean, x, y)
    witness: tuple | None = None  # worst pair at the first rejected delta

    @property
    def accepted(self) -> bool:
        return self.delta is not None


def mean_equicontinuity_modulus(m: MapSystem, region: Subgraph | None, eps: float, pair_samples: int,
                                N: int, seed: int = 0, deltas=DEFAULT_DELTAS) -> ModulusReport:
    """Largest ``delta`` in a decreasing grid whose sampled close pairs all average below ``eps``."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    rng = rng_for(seed, "meaneq")
    rep = ModulusReport(None, eps, N)
    for delta in sorted(deltas, reverse=True):
        X = _region_states(m, region, rng, pair_samples)
        Y = m.perturb_states(X, delta, rng)
        d0 = m.float_dist(X, Y)
        keep = d0 < delta
        X, Y = X[keep], Y[keep]
        st = tuple_statistics(m, np.stack([X, Y], axis=1), N)
        means = st.mean[:, 0]
        w = int(np.argmax(means))
        worst = float(means[w])
        rep.tested.append((delta, worst, X[w], Y[w]))
        if worst < eps:
            rep.delta = delta
            break
        if rep.witness is None:
            rep.witness = (delta, X[w], Y[w], worst)
    return rep


def mean_sensitivity_constant(m: MapSystem, base_samples: int, perturb_samples: int, N: int,
                              seed: int = 0, radius: float = 1e-3):
    """Empirical lower bound for the mean-sensitivity constant.

    Returns ``(estimate, (x, y))`` where ``estimate`` is the max over sampled
    base points of the max over perturbations within ``radius``.
    """
    if base_samples < 1 or perturb_samples < 1:
        raise DomainError("sample counts must be positive")
    rng = rng_for(seed, "sensitivity")
    X = m.sample_states(rng, base_samples)
    Xr = np.repeat(X, perturb_samples, axis=0)
    Y = m.perturb_states(Xr, radius, rng)
    st = tuple_statistics(m, np.stack([Xr, Y], axis=1), N)
    means = st.mean[:, 0]
    w = int(np.argmax(means))
    return float(means[w]), (Xr[w], Y[w])


def banach_density_lower(m: MapSystem, x, y, eps: float, N: int, L: int):
    """Min over length-L windows in [0, N) of the fraction of times with d < eps.

    Returns ``(value, start of the worst window)``.
    """
    if not 1 <= L <= N:
        raise DomainError("need 1 <= L <= N")
    ox = m.float_orbit(x, N)
    oy = m.float_orbit(y, N)
    hits = (m.float_dist(ox, oy) < eps).astype(np.int64)
    c = np.concatenate([[0], np.cumsum(hits)])
    win = c[L:] - c[:-L]
    i = int(np.argmin(win))
    return float(win[i] / L), i
