"""Trajectories, lasso detection and the matrix-iteration transient algorithm."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import DimensionMismatch
from .graph import cycle_time_vector
from .maxplus import (
    EPS,
    MaxPlusMatrix,
    require_regular,
    require_square,
    vector,
)


@dataclass(frozen=True)
class Orbit:
    states: tuple  # of column vectors x(0), x(1), ...
    matrix: MaxPlusMatrix

    def __len__(self):
        return len(self.states)

    def __getitem__(self, k):
        return self.states[k]

    def value(self, k, i):
        """x_i(k) with 0-based variable index i."""
        return self.states[k].entries[i][0]


@dataclass(frozen=True)
class LassoWitness:
    k: int
    l: int
    alpha: Fraction

    def __post_init__(self):
        if not (self.k >= self.l >= 0):
            raise ValueError("a lasso needs k >= l >= 0")


@dataclass(frozen=True)
class TransientResult:
    """Outcome of a transient computation: 'found', 'bound_reached' or 'no_transient'."""

    outcome: str
    l: int | None = None
    c: int | None = None

    FOUND = "found"
    BOUND_REACHED = "bound_reached"
    NO_TRANSIENT = "no_transient"

    def __post_init__(self):
        if self.outcome == self.FOUND and (self.c is None or self.c < 1 or self.l < 0):
            raise ValueError("Found needs l >= 0 and c >= 1")

    @classmethod
    def found(cls, l, c):
        return cls(cls.FOUND, l, c)

    @classmethod
    def bound_reached(cls):
        return cls(cls.BOUND_REACHED)

    @classmethod
    def no_transient(cls):
        return cls(cls.NO_TRANSIENT)

    @property
    def is_found(self):
        return self.outcome == self.FOUND

    @property
    def pair(self):
        return (self.l, self.c) if self.is_found else None


def _check_vector(A, x0):
    require_square(A)
    if x0.cols != 1 or x0.rows != A.rows:
        raise DimensionMismatch(f"vector of shape {x0.shape} does not fit a {A.rows}x{A.rows} matrix")


def step(A: MaxPlusMatrix, x: list) -> list:
    """One application of A to a flat list of scalars."""
    out = []
    for row in A.entries:
        best = EPS
        for a, v in zip(row, x):
            if a is not EPS and v is not EPS:
                s = a + v
                if best is EPS or s > best:
                    best = s
        out.append(best)
    return out


def simulate(A: MaxPlusMatrix, x0, horizon: int) -> Orbit:
    if not isinstance(x0, MaxPlusMatrix):
        x0 = vector(x0)
    _check_vector(A, x0)
    require_regular(A)
    cur = x0.to_list()
    states = [x0]
    for _ in range(horizon):
        cur = step(A, cur)
        states.append(vector(cur))
    return Orbit(tuple(states), A)


def shift_of(u: list, v: list):
    """Return alpha with u = alpha + v entrywise (matching epsilon patterns), else None."""
    alpha = None
    for a, b in zip(u, v):
        if (a is EPS) != (b is EPS):
            return None
        if a is EPS:
            continue
        d = a - b
        if alpha is None:
            alpha = d
        elif d != alpha:
            return None
    return Fraction(0) if alpha is None else alpha


def detect_lasso(orbit: Orbit):
    """Smallest (k, l) in the prefix with x(k+1) = alpha + x(l); None when absent."""
    vals = [s.to_list() for s in orbit.states]
    for k in range(len(vals) - 1):
        for l in range(k + 1):
            alpha = shift_of(vals[k + 1], vals[l])
            if alpha is not None:
                return LassoWitness(k, l, alpha)
    return None


# Integer kernel. All finite entries are scaled by a common denominator so the
# hot loops of the transient algorithm run on Python ints; None plays epsilon.


def _denominators(rows):
    for row in rows:
        for a in row:
            if a is not EPS:
                yield a.denominator


def scale_factor(*grids, extra=()):
    s = 1
    for g in grids:
        for d in _denominators(g):
            s = lcm(s, d)
    for q in extra:
        s = lcm(s, Fraction(q).denominator)
    return s


def to_int_grid(rows, s):
    return [[None if a is EPS else int(a * s) for a in row] for row in rows]


def int_mul(A_int, M_int):
    """Max-plus product on the integer kernel (row lists times column-major lists)."""
    n = len(M_int[0]) if M_int else 0
    out = []
    for row in A_int:
        fin = [(k, a) for k, a in enumerate(row) if a is not None]
        new = []
        for j in range(n):
            best = None
            for k, a in fin:
                b = M_int[k][j]
                if b is not None:
                    s = a + b
                    if best is None or s > best:
                        best = s
            new.append(best)
        out.append(new)
    return out


def _normal_key(M_int, shift):
    return tuple(tuple(None if v is None else v - shift for v in row) for row in M_int)


def trans_cone(A: MaxPlusMatrix, U: MaxPlusMatrix, N: int, chi=None) -> TransientResult:
    """Transient and cyclicity of A restricted to the cone spanned by U's columns.

    Iterates M[it] = A M[it-1] from M[0] = U and stops at the first it with
    M[it] = (lambda m) M[it-m] for some 1 <= m <= it, scanning m upwards.
    """
    require_square(A)
    if U.rows != A.rows:
        raise DimensionMismatch(f"cone generators have {U.rows} rows, matrix has {A.rows}")
    require_regular(A)
    if chi is None:
        chi = cycle_time_vector(A)
    if any(x != chi[0] for x in chi):
        return TransientResult.no_transient()
    lam = chi[0]
    s = scale_factor(A.entries, U.entries, extra=(lam,))
    A_int = to_int_grid(A.entries, s)
    cur = to_int_grid(U.entries, s)
    lam_int = int(lam * s)
    # normalised iterate M[it] - lambda*it -> it; with the earliest return the
    # dictionary holds each key once, so the smallest m is the latest index
    seen = {_normal_key(cur, 0): 0}
    it = 0
    while it < N:
        cur = int_mul(A_int, cur)
        it += 1
        key = _normal_key(cur, lam_int * it)
        j = seen.get(key)
        if j is not None:
            return TransientResult.found(j, it - j)
        seen[key] = it
    return TransientResult.bound_reached()


def local_transient(A: MaxPlusMatrix, x0, N: int, chi=None) -> TransientResult:
    if not isinstance(x0, MaxPlusMatrix):
        x0 = vector(x0)
    _check_vector(A, x0)
    return trans_cone(A, x0, N, chi=chi)
