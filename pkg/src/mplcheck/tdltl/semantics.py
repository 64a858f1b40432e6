"""Concrete semantics over orbits: the ground truth every symbolic algorithm is tested against."""

from __future__ import annotations

from fractions import Fraction

from ..errors import EpsilonOperand, HorizonTooShort, NotALasso
from ..maxplus import EPS, MaxPlusMatrix, vector
from ..orbit import Orbit, local_transient, shift_of, simulate
from .ast import (
    And,
    Atom,
    Bottom,
    Finally,
    Formula,
    Globally,
    Next,
    Not,
    Or,
    Release,
    Top,
    Until,
    max_offset,
)


def _value(vals, pos, idx):
    if idx == 0:
        return Fraction(0)
    if pos >= len(vals):
        raise HorizonTooShort(f"orbit prefix has {len(vals)} states, position {pos} requested")
    v = vals[pos][idx - 1]
    if v is EPS:
        raise EpsilonOperand(f"x{idx}({pos}) is epsilon")
    return v


def _compare(lhs, rhs, strict):
    return lhs > rhs if strict else lhs >= rhs


def _atom_on(vals, p: Atom, m=0):
    lhs = _value(vals, m + p.k, p.i) - _value(vals, m + p.l, p.j)
    return _compare(lhs, p.alpha, p.strict)


def _states(orbit):
    return [s.to_list() for s in orbit.states]


def eval_td_atom(orbit: Orbit, p: Atom, m: int = 0) -> bool:
    """Truth of x_i(m+k) - x_j(m+l) ~ alpha on the orbit."""
    return _atom_on(_states(orbit), p, m)


def eval_td(orbit_or_states, f: Formula, m: int = 0) -> bool:
    """Evaluate a Boolean (non-temporal) TD formula at position m."""
    vals = _states(orbit_or_states) if isinstance(orbit_or_states, Orbit) else orbit_or_states

    def go(g):
        if isinstance(g, Top):
            return True
        if isinstance(g, Bottom):
            return False
        if isinstance(g, Atom):
            return _atom_on(vals, g, m)
        if isinstance(g, Not):
            return not go(g.arg)
        if isinstance(g, And):
            return all(go(a) for a in g.args)
        if isinstance(g, Or):
            return any(go(a) for a in g.args)
        raise TypeError(f"temporal operator {type(g).__name__} in a TD formula")

    return go(f)


def eval_initial(f: Formula, x) -> bool:
    """Evaluate an initial formula (offsets 0, index 0 = constant zero) on a vector."""
    if isinstance(x, MaxPlusMatrix):
        x = x.to_list()
    return eval_td([list(x)], f, 0)


def eval_lasso(vals, f: Formula, k: int, l: int) -> bool:
    """Truth of f at position 0 of the (k,l)-lasso whose concrete states are vals.

    Positions range over 0..k and the successor of k is l. vals must extend
    far enough for every atom offset read from positions up to k.
    """
    memo = {}

    def path(m):
        # positions visited from m before the path starts repeating
        seq = list(range(m, k + 1))
        if l < m:
            seq += list(range(l, m))
        return seq

    def at(g, m):
        key = (id(g), m)
        r = memo.get(key)
        if r is not None:
            return r
        if isinstance(g, Top):
            r = True
        elif isinstance(g, Bottom):
            r = False
        elif isinstance(g, Atom):
            r = _atom_on(vals, g, m)
        elif isinstance(g, Not):
            r = not at(g.arg, m)
        elif isinstance(g, And):
            r = all(at(a, m) for a in g.args)
        elif isinstance(g, Or):
            r = any(at(a, m) for a in g.args)
        elif isinstance(g, Next):
            r = at(g.arg, m + 1 if m < k else l)
        elif isinstance(g, Finally):
            r = any(at(g.arg, j) for j in range(min(m, l), k + 1))
        elif isinstance(g, Globally):
            r = all(at(g.arg, j) for j in range(min(m, l), k + 1))
        elif isinstance(g, Until):
            r = False
            for j in path(m):
                if at(g.right, j):
                    r = True
                    break
                if not at(g.left, j):
                    break
        elif isinstance(g, Release):
            r = True
            for j in path(m):
                if not at(g.right, j):
                    r = False
                    break
                if at(g.left, j):
                    break
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    return at(f, 0)


def eval_bounded(A: MaxPlusMatrix, x0, phi: Formula, k: int, l: int) -> bool:
    """Bounded semantics of phi on the orbit of x0, which must be a (k,l)-lasso."""
    if not 0 <= l <= k:
        raise NotALasso(f"need 0 <= l <= k, got k={k}, l={l}")
    horizon = k + 1 + max(max_offset(phi), 0)
    vals = _states(simulate(A, x0, horizon))
    if shift_of(vals[k + 1], vals[l]) is None:
        raise NotALasso(f"x({k + 1}) is not a shift of x({l})")
    return eval_lasso(vals, phi, k, l)


def holds(A: MaxPlusMatrix, x0, phi: Formula, N: int = 10_000) -> bool:
    """Decide whether the orbit of x0 satisfies phi, via its local transient."""
    if not isinstance(x0, MaxPlusMatrix):
        x0 = vector(x0)
    tr = local_transient(A, x0, N)
    if not tr.is_found:
        raise NotALasso(f"no periodic regime found for this orbit ({tr.outcome})")
    return eval_bounded(A, x0, phi, tr.l + tr.c - 1, tr.l)
