"""Arithmetic weights, oscillation diagnostics and twisted ergodic sums.

Möbius and Liouville values come from a segmented sieve.  Sums of the form
``(1/N) sum c_n phi(f^n x)`` are evaluated in one pass over a float orbit and
reported at decade checkpoints so that decay can be inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import MapSystem
from .errors import DomainError

__all__ = [
    "ArithmeticSequence",
    "Observable",
    "primes_up_to",
    "mobius_table",
    "liouville_table",
    "mertens",
    "oscillating_check",
    "disjointness_sum",
    "davenport_sum",
    "checkpoints",
]

SEGMENT = 1 << 20


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _sieve_segments(N: int, liouville: bool):
    """Yield (start, values) for consecutive segments covering 1..N."""
    primes = primes_up_to(math.isqrt(N) + 1)
    for lo in range(1, N + 1, SEGMENT):
        hi = min(N + 1, lo + SEGMENT)
        n = np.arange(lo, hi, dtype=np.int64)
        rest = n.copy()
        if liouville:
            omega = np.zeros(hi - lo, dtype=np.int64)
        else:
            val = np.ones(hi - lo, dtype=np.int8)
        for p in primes:
            p = int(p)
            if p * p > hi - 1:
                break
            first = (-lo) % p
            if liouville:
                pk = p
                while pk < hi:
                    f = (-lo) % pk
                    rest[f::pk] //= p
                    omega[f::pk] += 1
                    pk *= p
            else:
                val[first::p] *= -1
                rest[first::p] //= p
                sq = p * p
                val[(-lo) % sq :: sq] = 0
        if liouville:
            omega += rest > 1
            yield lo, np.where(omega % 2 == 0, 1, -1).astype(np.int8)
        else:
            # one prime factor above sqrt(n) remains in ``rest``
            val[rest > 1] *= -1
            yield lo, val


def mobius_table(N: int) -> np.ndarray:
    """``mu(1..N)`` as int8 (index 0 holds mu(1))."""
    if N < 1:
        raise DomainError("N must be at least 1")
    return np.concatenate([v for _, v in _sieve_segments(N, liouville=False)])


def liouville_table(N: int) -> np.ndarray:
    if N < 1:
        raise DomainError("N must be at least 1")
    return np.concatenate([v for _, v in _sieve_segments(N, liouville=True)])


def mertens(N: int) -> int:
    """Sum of mu(n) for n <= N, accumulated segment by segment."""
    return int(sum(int(v.sum(dtype=np.int64)) for _, v in _sieve_segments(N, liouville=False)))


@dataclass
class ArithmeticSequence:
    """Weights c_1, c_2, ...; ``kind`` is ``mobius``, ``liouville``, ``table`` or ``constant``."""

    kind: str = "mobius"
    table: np.ndarray | None = None
    constant: complex = 1.0
    _cache: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("mobius", "liouville", "table", "constant"):
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "table":
            if self.table is None:
                raise DomainError("table sequences need values")
            self.table = np.asarray(self.table)

    def values(self, N: int) -> np.ndarray:
        """c_1..c_N."""
        if N < 1:
            raise DomainError("N must be at least 1")
        if self.kind == "constant":
            return np.full(N, self.constant)
        if self.kind == "table":
            if len(self.table) < N:
                raise DomainError(f"table has only {len(self.table)} values")
            return self.table[:N]
        if self._cache is None or len(self._cache) < N:
            fn = mobius_table if self.kind == "mobius" else liouville_table
            self._cache = fn(N)
        return self._cache[:N]

    @property
    def bound(self) -> float:
        if self.kind in ("mobius", "liouville"):
            return 1.0
        if self.kind == "constant":
            return abs(self.constant)
        return float(np.abs(self.table).max())

    @classmethod
    def parse(cls, text: str) -> "ArithmeticSequence":
        if text in ("mobius", "liouville"):
            return cls(text)
        if text.startswith("const"):
            _, _, v = text.partition(":")
            return cls("constant", constant=complex(v) if v else 1.0)
        raise DomainError(f"cannot parse sequence {text!r}")


class Observable:
    """Continuous function of a point's coordinate.

    ``exp2pii`` is ``x -> exp(2 pi i x)``, ``coord`` is ``x -> x``, ``one`` is
    the constant 1, and ``poly:c0,c1,...`` is ``sum c_j x^j``.
    """

    def __init__(self, spec: str = "exp2pii"):
        self.spec = spec
        if spec == "exp2pii":
            self.bound = 1.0
        elif spec in ("coord", "one"):
            self.bound = None
        elif spec.startswith("poly:"):
            self.coeffs = [float(c) for c in spec[5:].split(",") if c]
            if not self.coeffs:
                raise DomainError("empty polynomial")
            self.bound = None
        else:
            raise DomainError(f"unknown observable {spec!r}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.spec == "exp2pii":
            return np.exp(2j * np.pi * x)
        if self.spec == "coord":
            return x.astype(complex)
        if self.spec == "one":
            return np.ones_like(x, dtype=complex)
        return np.polyval(self.coeffs[::-1], x).astype(complex)

    def __repr__(self):
        return f"Observable({self.spec!r})"


def checkpoints(N: int, first: int = 1000) -> list:
    """Decades ``first, 10 first, ...`` below N, followed by N."""
    pts = []
    c = first
    while c < N:
        pts.append(c)
        c *= 10
    pts.append(N)
    return pts


def _trace(terms: np.ndarray, N: int, first: int = 1000) -> list:
    csum = np.cumsum(terms)
    return [(n, complex(csum[n - 1] / n)) for n in checkpoints(N, first)]


def oscillating_check(c: ArithmeticSequence, lam: float, t_grid, N_list) -> dict:
    """Twisted averages ``(1/N)|sum_{n<=N} c_n e^{-2 pi i n t}|`` on a grid of t.

    Also reports the growth averages ``(1/N) sum |c_n|^lam`` and their max.
    """
    t_grid = list(t_grid)
    N_list = sorted(int(n) for n in N_list)
    if not t_grid or not N_list:
        raise DomainError("empty t grid or N list")
    if lam <= 0:
        raise DomainError("lambda must be positive")
    Nmax = N_list[-1]
    cv = c.values(Nmax).astype(complex)
    n = np.arange(1, Nmax + 1, dtype=np.float64)
    idx = np.array(N_list) - 1
    rows = []
    for t in t_grid:
        phase = np.exp(-2j * np.pi * np.mod(n * float(t), 1.0))
        cs = np.cumsum(cv * phase)[idx]
        for N, v in zip(N_list, cs):
            rows.append({"t": float(t), "N": N, "value": abs(v) / N})
    growth_cs = np.cumsum(np.abs(cv) ** lam)[idx]
    growth = [{"N": N, "value": float(v / N)} for N, v in zip(N_list, growth_cs)]
    at_max = [r for r in rows if r["N"] == Nmax]
    worst = max(at_max, key=lambda r: r["value"])
    return {
        "rows": rows,
        "growth": growth,
        "max_over_t": worst["value"],
        "argmax_t": worst["t"],
        "growth_bound": max(g["value"] for g in growth),
        "grid_size": len(t_grid),
    }


def disjointness_sum(m: MapSystem, x, phi: Observable, c: ArithmeticSequence, N: int, first: int = 1000):
    """``(1/N) sum_{n=1}^N c_n phi(f^n x)`` with its decade trace.

    Returns ``(value, [(checkpoint, partial average), ...])``.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    if isinstance(phi, str):
        phi = Observable(phi)
    orb = m.float_orbit(x, N + 1)[1:]
    vals = phi(m.state_coordinate(orb))
    terms = c.values(N) * vals
    tr = _trace(terms, N, first)
    return tr[-1][1], tr


def davenport_sum(alpha: float, N: int, first: int = 1000):
    """``(1/N) sum_{n<=N} mu(n) e^{2 pi i alpha n}`` with its decade trace.

    The phase is reduced modulo 1 in exact integer arithmetic when ``alpha``
    is rational with a small denominator, so alpha = 0 reproduces the Mertens
    ratio exactly.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    mu = mobius_table(N).astype(np.int64)
    n = np.arange(1, N + 1, dtype=np.int64)
    a = Fraction(alpha).limit_denominator(10 ** 6)
    if abs(float(a) - float(alpha)) < 1e-15 and a.denominator <= 10 ** 6:
        frac = ((n * a.numerator) % a.denominator) / a.denominator
    else:
        frac = np.mod(n * float(alpha), 1.0)
    phase = np.exp(2j * np.pi * frac)
    phase[frac == 0] = 1.0
    tr = _trace(mu * phase, N, first)
    return tr[-1][1], tr
