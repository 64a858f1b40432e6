"""Transient and cyclicity of a set of initial conditions via SMT solving."""

from __future__ import annotations

from math import lcm

from ..errors import NoThreshold
from ..graph import cycle_time_vector
from ..maxplus import MaxPlusMatrix, mat_mul, powers_of, require_regular, require_square, scalar_mat_mul, vector
from ..orbit import TransientResult, trans_cone
from ..smt.formula import r_not
from ..smt.solver import DifferenceSolver, SolverStats
from ..tdltl.ast import TRUE, Formula
from .encode import decode_vector, eq_func, initial_to_rdl


def trans_smt(
    A: MaxPlusMatrix,
    X: Formula = TRUE,
    N: int = 1000,
    stats: SolverStats | None = None,
    form: str = "cnf",
) -> TransientResult:
    """Smallest (l, c) such that A^(l+c) x = lambda c + A^l x for every x in X.

    Each round asks the solver for some x in X breaking the current guess; the
    local pair of A^l x then tells how far to extend l and c.
    """
    require_square(A)
    require_regular(A)
    chi = cycle_time_vector(A)
    if any(v != chi[0] for v in chi):
        return TransientResult.no_transient()
    lam = chi[0]
    n = A.rows
    powers = powers_of(A)
    solver = DifferenceSolver()
    solver.add(initial_to_rdl(X))
    l, c = 0, 1
    try:
        while l + c <= N:
            F = eq_func(powers[l + c], scalar_mat_mul(lam * c, powers[l]), form)
            solver.push()
            solver.add(r_not(F))
            res = solver.check()
            solver.pop()
            if res.is_unsat:
                return TransientResult.found(l, c)
            if not res.is_sat:
                return TransientResult.bound_reached()
            v = vector(decode_vector(res.model, n))
            sub = trans_cone(A, mat_mul(powers[l], v), N, chi=chi)
            if not sub.is_found:
                return sub
            if sub.l == 0 and c % sub.c == 0:
                # cannot happen for a genuine counterexample; guard against looping
                raise RuntimeError("transient refinement made no progress")
            l, c = l + sub.l, lcm(c, sub.c)
        return TransientResult.bound_reached()
    finally:
        if stats is not None:
            stats.merge(solver.stats)


def completeness_threshold(A: MaxPlusMatrix, X: Formula = TRUE, N: int = 1000) -> int:
    tr = trans_smt(A, X, N)
    if not tr.is_found:
        raise NoThreshold(f"no transient within bound {N} ({tr.outcome})")
    return tr.l + tr.c - 1
