"""Rewriting of time-shifted atoms into atoms over the initial state only."""

from __future__ import annotations

from fractions import Fraction

from ..maxplus import EPS, MatrixPowers, MaxPlusMatrix, powers_of, require_regular, require_square
from .ast import FALSE, TRUE, Atom, Formula, conj, disj, map_atoms


def _holds(a, b, strict):
    return a > b if strict else a >= b


def reduce_max_ineq(a, b, strict: bool, form: str = "cnf") -> Formula:
    """Reduce max_r(x_r + a_r) ~ max_s(x_s + b_s) to a formula of difference atoms.

    a and b are scalar lists indexed by variable (0-based); ~ is > when strict,
    otherwise >=. Indices in the produced atoms are 1-based.
    """
    if form not in ("cnf", "dnf"):
        raise ValueError("form must be 'cnf' or 'dnf'")
    s1 = [r for r, (ar, br) in enumerate(zip(a, b)) if ar is not EPS and (br is EPS or _holds(ar, br, strict))]
    s2 = [s for s, (as_, bs) in enumerate(zip(a, b)) if bs is not EPS and (as_ is EPS or not _holds(as_, bs, strict))]
    if not s2:
        return TRUE
    if not s1:
        return FALSE

    def lit(r, s):
        return Atom(r + 1, s + 1, 0, 0, strict, b[s] - a[r])

    if form == "cnf":
        return conj(*[disj(*[lit(r, s) for r in s1]) for s in s2])
    # distribute: choose one witness r for every s
    clauses = [[]]
    for s in s2:
        clauses = [c + [lit(r, s)] for c in clauses for r in s1]
    return disj(*[conj(*c) for c in clauses])


class InitialRewriter:
    """get_initial with a shared power cache and per-atom memo."""

    def __init__(self, A: MaxPlusMatrix, form: str = "cnf", powers: MatrixPowers | None = None):
        require_square(A)
        require_regular(A)
        self.A = A
        self.form = form
        self.powers = powers or powers_of(A)
        self._memo = {}

    def atom(self, p: Atom) -> Formula:
        r = self._memo.get(p)
        if r is None:
            r = self._rewrite(p)
            self._memo[p] = r
        return r

    def _rewrite(self, p: Atom) -> Formula:
        if p.i == 0 or p.j == 0:
            if p.k or p.l:
                raise ValueError("bounds against the zero constant cannot carry offsets")
            return p
        a = list(self.powers[p.k].row(p.i - 1))
        brow = self.powers[p.l].row(p.j - 1)
        b = [EPS if v is EPS else v + p.alpha for v in brow]
        return reduce_max_ineq(a, b, p.strict, self.form)

    def __call__(self, f: Formula) -> Formula:
        return map_atoms(f, self.atom)


def get_initial(A: MaxPlusMatrix, f: Formula, form: str = "cnf") -> Formula:
    """Equivalent formula whose atoms only mention the initial state x(0)."""
    return InitialRewriter(A, form)(f)


def get_initial_tdltl(A: MaxPlusMatrix, phi: Formula, form: str = "cnf") -> Formula:
    """Atom-wise get_initial, keeping the temporal skeleton."""
    return InitialRewriter(A, form)(phi)


def is_initial_formula(f: Formula) -> bool:
    from .ast import atoms

    return all(a.is_initial for a in atoms(f))
