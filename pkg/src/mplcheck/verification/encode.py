"""Difference-logic encodings of MPL dynamics and of bounded TDLTL counterexamples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DimensionMismatch
from ..maxplus import EPS, MaxPlusMatrix, require_regular, require_square
from ..smt.formula import (
    FALSE as RFALSE,
    TRUE as RTRUE,
    ZERO,
    RAnd,
    RAtom,
    RdlFormula,
    ROr,
    r_and,
    r_not,
    r_or,
)
from ..tdltl.ast import (
    FALSE,
    TRUE,
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
    conj,
    disj,
    negate,
)
from ..tdltl.rewrite import InitialRewriter, reduce_max_ineq

UNROLLED = "unrolled"
INITIALISED = "initialised"


def var_name(i: int, gen: int) -> str:
    """Solver name of x_i at generation gen (i is 1-based; 0 is the zero constant)."""
    return ZERO if i == 0 else f"x{i}_{gen}"


@dataclass(frozen=True)
class SymbState:
    generation: int
    n: int

    def var(self, i: int) -> str:
        return var_name(i, self.generation)

    @property
    def variables(self):
        return [self.var(i) for i in range(1, self.n + 1)]


def decode_vector(model: dict, n: int, gen: int = 0) -> list:
    return [model.get(var_name(i, gen), Fraction(0)) for i in range(1, n + 1)]


def td_to_rdl(f: Formula) -> RdlFormula:
    """Translate a Boolean TD formula; atom offsets become generations."""
    memo = {}

    def go(g):
        r = memo.get(id(g))
        if r is not None:
            return r[0]
        if isinstance(g, Top):
            r = RTRUE
        elif isinstance(g, Bottom):
            r = RFALSE
        elif isinstance(g, Atom):
            r = RAtom(var_name(g.i, g.k), var_name(g.j, g.l), ">" if g.strict else ">=", g.alpha)
        elif isinstance(g, (And, Or)):
            parts = [go(a) for a in g.args]
            if isinstance(g, And):
                if any(p is RFALSE for p in parts):
                    r = RFALSE
                else:
                    parts = [p for p in parts if p is not RTRUE]
                    r = RTRUE if not parts else parts[0] if len(parts) == 1 else RAnd(tuple(parts))
            else:
                if any(p is RTRUE for p in parts):
                    r = RTRUE
                else:
                    parts = [p for p in parts if p is not RFALSE]
                    r = RFALSE if not parts else parts[0] if len(parts) == 1 else ROr(tuple(parts))
        elif isinstance(g, Not):
            r = r_not(go(g.arg))
        else:
            raise TypeError(f"temporal operator {type(g).__name__} cannot be translated directly")
        memo[id(g)] = (r, g)
        return r

    return go(f)


def initial_to_rdl(X: Formula) -> RdlFormula:
    return td_to_rdl(X)


def symb_mpl(A: MaxPlusMatrix, gen_from: SymbState, gen_to: SymbState) -> RdlFormula:
    """x(to) = A x(from) as difference constraints, row by row."""
    require_square(A)
    require_regular(A)
    rows = []
    for i, row in enumerate(A.entries, 1):
        fin = [(j, a) for j, a in enumerate(row, 1) if a is not EPS]
        lo = [RAtom(gen_to.var(i), gen_from.var(j), ">=", a) for j, a in fin]
        eq = [RAtom(gen_to.var(i), gen_from.var(j), "=", a) for j, a in fin]
        rows.append(r_and(*lo, r_or(*eq)))
    return r_and(*rows)


def orbit_constraints(A: MaxPlusMatrix, upto: int) -> RdlFormula:
    """Generations 0..upto linked by the dynamics."""
    n = A.rows
    return r_and(*[symb_mpl(A, SymbState(g, n), SymbState(g + 1, n)) for g in range(upto)])


def eq_func_td(R: MaxPlusMatrix, S: MaxPlusMatrix, form: str = "cnf") -> Formula:
    if R.shape != S.shape or not R.is_square:
        raise DimensionMismatch("eq_func needs two square matrices of equal size")
    parts = []
    for r, s in zip(R.entries, S.entries):
        parts.append(reduce_max_ineq(list(r), list(s), False, form))
        parts.append(reduce_max_ineq(list(s), list(r), False, form))
    return conj(*parts)


def eq_func(R: MaxPlusMatrix, S: MaxPlusMatrix, form: str = "cnf") -> RdlFormula:
    """Formula over generation-0 variables equivalent to R x = S x."""
    return td_to_rdl(eq_func_td(R, S, form))


def loop_constraint_td(n: int, k_plus_1: int, l: int, lam) -> Formula:
    if not k_plus_1 > l >= 0:
        raise ValueError("the loop constraint needs k+1 > l >= 0")
    shift = Fraction(lam) * (k_plus_1 - l)
    parts = []
    for i in range(1, n + 1):
        parts.append(Atom(i, i, k_plus_1, l, False, shift))
        parts.append(Atom(i, i, l, k_plus_1, False, -shift))
    return conj(*parts)


def loop_constraint(A_or_n, k_plus_1: int, l: int, lam) -> RdlFormula:
    """x_i(k+1) - x_i(l) = lam (k - l + 1) for every i."""
    n = A_or_n if isinstance(A_or_n, int) else A_or_n.rows
    return td_to_rdl(loop_constraint_td(n, k_plus_1, l, lam))


def _and2(a, b):
    # binary conjunction without flattening, so prefix chains share structure
    if isinstance(a, Bottom) or isinstance(b, Bottom):
        return FALSE
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    return And((a, b))


def witness_encoding(psi: Formula, k: int, l: int, m: int = 0) -> Formula:
    """Boolean TD formula, over generation-indexed atoms, true iff psi holds at
    position m of a (k,l)-lasso. psi must be in positive normal form."""
    if not (0 <= l <= k and 0 <= m <= k):
        raise ValueError("need 0 <= l <= k and 0 <= m <= k")
    memo = {}

    def enc(g, pos):
        key = (id(g), pos)
        r = memo.get(key)
        if r is not None:
            return r
        if isinstance(g, (Top, Bottom)):
            r = g
        elif isinstance(g, Atom):
            r = g.shifted(pos)
        elif isinstance(g, And):
            r = conj(*[enc(a, pos) for a in g.args])
        elif isinstance(g, Or):
            r = disj(*[enc(a, pos) for a in g.args])
        elif isinstance(g, Next):
            r = enc(g.arg, pos + 1 if pos < k else l)
        elif isinstance(g, Finally):
            r = disj(*[enc(g.arg, j) for j in range(min(pos, l), k + 1)])
        elif isinstance(g, Globally):
            r = conj(*[enc(g.arg, j) for j in range(min(pos, l), k + 1)])
        elif isinstance(g, Until):
            r = _until(g, pos)
        elif isinstance(g, Release):
            r = _release(g, pos)
        elif isinstance(g, Not):
            raise ValueError("witness encoding expects a formula in positive normal form")
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    def _until(g, pos):
        options = []
        prefix = TRUE  # psi1 at pos..j-1
        for j in range(pos, k + 1):
            options.append(_and2(enc(g.right, j), prefix))
            prefix = _and2(prefix, enc(g.left, j))
        # prefix now covers pos..k; continue through the loop l..pos-1
        wrap = prefix
        for j in range(l, pos):
            options.append(_and2(enc(g.right, j), wrap))
            wrap = _and2(wrap, enc(g.left, j))
        return disj(*options)

    def _release(g, pos):
        options = [conj(*[enc(g.right, j) for j in range(min(pos, l), k + 1)])]
        prefix = TRUE  # psi2 at pos..j
        for j in range(pos, k + 1):
            prefix = _and2(prefix, enc(g.right, j))
            options.append(_and2(enc(g.left, j), prefix))
        wrap = prefix
        for j in range(l, pos):
            wrap = _and2(wrap, enc(g.right, j))
            options.append(_and2(enc(g.left, j), wrap))
        return disj(*options)

    return enc(psi, m)


def bmc_body_td(phi: Formula, n: int, k: int, l: int, lam) -> Formula:
    """Loop constraint and witness of the negated property, as one TD formula."""
    psi = negate(phi)
    return conj(loop_constraint_td(n, k + 1, l, lam), witness_encoding(psi, k, l, 0))


def build_bmc_formula(
    A: MaxPlusMatrix,
    X: Formula,
    phi: Formula,
    k: int,
    l: int,
    lam,
    style: str = UNROLLED,
    rewriter: InitialRewriter | None = None,
) -> RdlFormula:
    """Satisfiable iff some (k,l)-lasso from X violates phi (atoms of phi must be initial)."""
    body = bmc_body_td(phi, A.rows, k, l, lam)
    if style == UNROLLED:
        return r_and(initial_to_rdl(X), orbit_constraints(A, k + 1), td_to_rdl(body))
    if style == INITIALISED:
        rewriter = rewriter or InitialRewriter(A)
        return r_and(initial_to_rdl(X), td_to_rdl(rewriter(body)))
    raise ValueError(f"unknown style {style!r}")
