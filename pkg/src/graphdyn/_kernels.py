"""Compiled inner loops for float simulation of one-edge systems.

A system is described to the kernels by ``(kind, px, py, ps, par)``:

* ``kind == PL``: piecewise affine on ``[0, L]``; piece ``i`` starts at
  ``px[i]`` with value ``py[i]`` and slope ``ps[i]``.  ``par = (wrap, L, dither)``.
* ``kind == LOGISTIC``: ``x -> r x (1 - x)`` with ``par[0] = r``.

Distances wrap around when ``wrap`` is set (circle of length ``L``).
"""

import numpy as np
from numba import njit

PL = 0
LOGISTIC = 1

_DITHER_SCALE = 2.0 ** -44
_TWO52 = 2.0 ** 52


@njit(cache=True, inline="always")
def _pl(x, px, py, ps, wrap, L, dither):
    lo = 0
    hi = px.shape[0] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if px[mid] <= x:
            lo = mid
        else:
            hi = mid - 1
    y = py[lo] + ps[lo] * (x - px[lo])
    if dither:
        # Dyadic expanding maps lose one mantissa bit per step and collapse
        # onto 0 in double precision; re-inject low-order bits from a hash of
        # the current state.  Equal states get equal perturbations.
        h = np.uint64(np.int64(x * _TWO52)) * np.uint64(0x9E3779B97F4A7C15)
        u = (h >> np.uint64(11)) * (1.0 / 9007199254740992.0) - 0.5
        y += u * _DITHER_SCALE * L
    if wrap:
        while y >= L:
            y -= L
        while y < 0.0:
            y += L
    else:
        if y < 0.0:
            y = 0.0
        elif y > L:
            y = L
    return y


@njit(cache=True, inline="always")
def _step(kind, x, px, py, ps, wrap, L, dither, r):
    if kind == LOGISTIC:
        return r * x * (1.0 - x)
    return _pl(x, px, py, ps, wrap, L, dither)


@njit(cache=True)
def step(kind, x, px, py, ps, par):
    return _step(kind, x, px, py, ps, par[0] > 0.0, par[1], par[2] > 0.0, par[0])


@njit(cache=True, inline="always")
def _dist(a, b, wrap, L):
    d = abs(a - b)
    if wrap and L - d < d:
        d = L - d
    return d


@njit(cache=True)
def orbit(kind, x0, n, px, py, ps, par):
    wrap, L, dither, r = par[0] > 0.0, par[1], par[2] > 0.0, par[0]
    out = np.empty(n)
    x = x0
    for k in range(n):
        out[k] = x
        x = _step(kind, x, px, py, ps, wrap, L, dither, r)
    return out


@njit(cache=True)
def orbits(kind, x0, n, px, py, ps, par):
    wrap, L, dither, r = par[0] > 0.0, par[1], par[2] > 0.0, par[0]
    m = x0.shape[0]
    out = np.empty((m, n))
    for j in range(m):
        x = x0[j]
        for k in range(n):
            out[j, k] = x
            x = _step(kind, x, px, py, ps, wrap, L, dither, r)
    return out


@njit(cache=True)
def tuple_stats(kind, X, n, w0, px, py, ps, par, pin_idx, pin_table, pin_period):
    """Per-tuple pair statistics along simultaneous orbits.

    ``X`` has shape (T, q).  For each tuple and each pair i < j returns the
    mean distance over [0, n) and the min/max over the window [w0, n); also
    per tuple the window min of the max pairwise distance ("closeness") and
    the window max of the min pairwise distance ("separation").
    ``pin_idx[t, i] >= 0`` replaces the float orbit of that coordinate by the
    stored exact cycle ``pin_table[pin_idx[t, i]]``.
    """
    wrap, L, dither, r = par[0] > 0.0, par[1], par[2] > 0.0, par[0]
    if kind == LOGISTIC:
        wrap = False
    T, q = X.shape
    npair = q * (q - 1) // 2
    mean = np.zeros((T, npair))
    wmin = np.full((T, npair), np.inf)
    wmax = np.zeros((T, npair))
    close = np.full(T, np.inf)
    sep = np.zeros(T)
    x = np.empty(q)
    pin = np.empty(q, dtype=np.int64)
    acc = np.empty(npair)
    mn = np.empty(npair)
    mx = np.empty(npair)
    for t in range(T):
        any_pin = False
        for i in range(q):
            pin[i] = pin_idx[t, i]
            if pin[i] >= 0:
                any_pin = True
                x[i] = pin_table[pin[i], 0]
            else:
                x[i] = X[t, i]
        acc[:] = 0.0
        mn[:] = np.inf
        mx[:] = 0.0
        cl = np.inf
        sp = 0.0
        for k in range(n):
            late = k >= w0
            c = 0
            dmax = 0.0
            dmin = np.inf
            for i in range(q):
                for j in range(i + 1, q):
                    dij = _dist(x[i], x[j], wrap, L)
                    acc[c] += dij
                    if late:
                        if dij < mn[c]:
                            mn[c] = dij
                        if dij > mx[c]:
                            mx[c] = dij
                    if dij > dmax:
                        dmax = dij
                    if dij < dmin:
                        dmin = dij
                    c += 1
            if late:
                if dmax < cl:
                    cl = dmax
                if dmin > sp:
                    sp = dmin
            if any_pin:
                for i in range(q):
                    if pin[i] >= 0:
                        x[i] = pin_table[pin[i], (k + 1) % pin_period[pin[i]]]
                    else:
                        x[i] = _step(kind, x[i], px, py, ps, wrap, L, dither, r)
            else:
                for i in range(q):
                    x[i] = _step(kind, x[i], px, py, ps, wrap, L, dither, r)
        for c in range(npair):
            mean[t, c] = acc[c] / n
            wmin[t, c] = mn[c]
            wmax[t, c] = mx[c]
        close[t] = cl
        sep[t] = sp
    return mean, wmin, wmax, close, sep


@njit(cache=True)
def logistic_iterate(r, x, n):
    for _ in range(n):
        x = r * x * (1.0 - x)
    return x
