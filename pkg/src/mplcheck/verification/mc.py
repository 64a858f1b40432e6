"""Bounded model checking of TDLTL properties with a completeness threshold."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from ..graph import max_cycle_mean
from ..maxplus import EPS, MaxPlusMatrix, identity, mat_mul, require_regular, require_square, scalar_mat_mul, vector
from ..orbit import LassoWitness, TransientResult, local_transient, simulate
from ..smt.formula import r_not
from ..smt.solver import DifferenceSolver, SolverStats
from ..tdltl.ast import Formula, to_pnf
from ..tdltl.rewrite import InitialRewriter
from ..tdltl.semantics import eval_bounded
from .encode import (
    INITIALISED,
    UNROLLED,
    bmc_body_td,
    decode_vector,
    initial_to_rdl,
    loop_constraint_td,
    symb_mpl,
    SymbState,
    td_to_rdl,
    var_name,
)
from .sampling import sample_initial
from .transient import trans_smt

INCREMENTAL = "incremental"
UPFRONT = "upfront"

VALID = "valid"
INVALID = "invalid"
BOUND_EXCEEDED = "bound_exceeded"


@dataclass
class Verdict:
    kind: str
    counterexample: MaxPlusMatrix | None = None
    lasso: LassoWitness | None = None
    bound: int | None = None
    k: int | None = None
    l: int | None = None
    c: int | None = None
    reason: str = ""
    stats: SolverStats = field(default_factory=SolverStats)
    wall_time: float = 0.0

    @property
    def is_valid(self):
        return self.kind == VALID

    @property
    def is_invalid(self):
        return self.kind == INVALID

    def describe(self) -> str:
        if self.kind == VALID:
            return f"Valid (k={self.k}, l={self.l}, c={self.c})"
        if self.kind == INVALID:
            vec = ", ".join(str(v) for v in self.counterexample.to_list())
            w = self.lasso
            return f"Invalid: x(0) = [{vec}], lasso k={w.k}, l={w.l}, alpha={w.alpha}"
        return f"BoundExceeded (N={self.bound}): {self.reason}"


class _Checker:
    """Shared state of one model-checking run: matrix, rewriter, solver."""

    def __init__(self, A, X, phi, N, style):
        require_square(A)
        require_regular(A)
        if style not in (UNROLLED, INITIALISED):
            raise ValueError(f"unknown style {style!r}")
        self.A = A
        self.n = A.rows
        self.X = X
        self.N = N
        self.style = style
        self.lam = max_cycle_mean(A)
        self.rewriter = InitialRewriter(A)
        # temporal skeleton kept, atoms moved to the initial state
        self.source = phi
        self.phi = self.rewriter(to_pnf(phi))
        self.solver = DifferenceSolver()
        self.solver.add(initial_to_rdl(X))
        self.unrolled_to = 0
        self.pool = None
        self.powers = [identity(self.n)]

    def _extend_orbit(self, upto):
        # the dynamics are functional, so these conjuncts never restrict x(0)
        while self.unrolled_to < upto:
            g = self.unrolled_to
            self.solver.add(symb_mpl(self.A, SymbState(g, self.n), SymbState(g + 1, self.n)))
            self.unrolled_to += 1

    def _solve(self, formula, hint=None):
        self.solver.push()
        self.solver.add(formula)
        if hint:
            self.solver.hint(hint)
        res = self.solver.check()
        self.solver.pop()
        if not (res.is_sat or res.is_unsat):
            raise RuntimeError("solver gave up")
        return res

    def _hint(self, k, prefer):
        """Values of the sampled orbit that best fits prefer(x, orbit), as solver variables."""
        chosen = None
        for x in self._samples():
            orbit = simulate(self.A, vector(x), k + 1)
            chosen = chosen or orbit
            if prefer(x, orbit):
                chosen = orbit
                break
        if chosen is None:
            return None
        upto = min(self.unrolled_to, k + 1) if self.style == UNROLLED else 0
        return {
            var_name(i + 1, g): chosen.value(g, i)
            for g in range(upto + 1)
            for i in range(self.n)
            if chosen.value(g, i) is not EPS
        }

    def _is_lasso(self, orbit, k, l):
        return orbit[k + 1] == scalar_mat_mul(self.lam * (k + 1 - l), orbit[l])

    def counterexample(self, k, l):
        """Model of a (k,l)-lasso from X violating phi, or None.

        The solver starts from the orbit of a sampled violating lasso when
        there is one.
        """
        body = bmc_body_td(self.phi, self.n, k, l, self.lam)
        if self.style == UNROLLED:
            self._extend_orbit(k + 1)
            f = td_to_rdl(body)
        else:
            f = td_to_rdl(self.rewriter(body))
        hint = self._hint(k, lambda x, o: self._is_lasso(o, k, l) and not eval_bounded(self.A, vector(x), self.source, k, l))
        res = self._solve(f, hint)
        return res.model if res.is_sat else None

    def _power(self, t):
        while len(self.powers) <= t:
            self.powers.append(mat_mul(self.A, self.powers[-1]))
        return self.powers[t]

    def _samples(self):
        if self.pool is None:
            rng = random.Random(0)
            self.pool = [x for spread in (10, 100, 1000) for x in sample_initial(self.X, self.n, 8, rng, spread)]
        return self.pool

    def escaping_state(self, k, l):
        """Some x in X whose orbit is not a (k,l)-lasso, or None.

        Sampled members of X are tried by simulation first; the solver is only
        needed when none of them escapes, typically to prove that none exists.
        """
        shift = self.lam * (k + 1 - l)
        for x in self._samples():
            if not self._is_lasso(simulate(self.A, vector(x), k + 1), k, l):
                return x
        # every orbit at all is a (k,l)-lasso when the powers of A already are
        if self._power(k + 1) == scalar_mat_mul(shift, self._power(l)):
            return None
        loop = loop_constraint_td(self.n, k + 1, l, self.lam)
        if self.style == UNROLLED:
            self._extend_orbit(k + 1)
            f = r_not(td_to_rdl(loop))
        else:
            f = r_not(td_to_rdl(self.rewriter(loop)))
        res = self._solve(f)
        return decode_vector(res.model, self.n) if res.is_sat else None

    def invalid(self, model, k, l, c):
        x0 = vector(decode_vector(model, self.n))
        alpha = self.lam * (k - l + 1)
        return Verdict(INVALID, counterexample=x0, lasso=LassoWitness(k, l, Fraction(alpha)), k=k, l=l, c=c)


def mc(
    A: MaxPlusMatrix,
    X: Formula,
    phi: Formula,
    N: int = 1000,
    style: str = UNROLLED,
    schedule: str = INCREMENTAL,
    transient: TransientResult | None = None,
) -> Verdict:
    """Decide (A, X) |= phi. Invalid verdicts carry a replayable lasso witness."""
    start = time.perf_counter()
    chk = _Checker(A, X, phi, N, style)
    stats = SolverStats()
    if schedule == INCREMENTAL:
        verdict = _incremental(chk)
    elif schedule == UPFRONT:
        verdict = _upfront(chk, transient, stats)
    else:
        raise ValueError(f"unknown schedule {schedule!r}")
    stats.merge(chk.solver.stats)
    verdict.stats = stats
    verdict.bound = N
    verdict.wall_time = time.perf_counter() - start
    return verdict


def _incremental(chk: _Checker) -> Verdict:
    l, c = 0, 1
    while True:
        k = l + c - 1
        if k > chk.N:
            return Verdict(BOUND_EXCEEDED, k=k, l=l, c=c, reason="terminated after reaching maximum bound")
        model = chk.counterexample(k, l)
        if model is not None:
            return chk.invalid(model, k, l, c)
        escaping = chk.escaping_state(k, l)
        if escaping is None:
            return Verdict(VALID, k=k, l=l, c=c)
        x = vector(escaping)
        sub = local_transient(chk.A, x, chk.N)
        if not sub.is_found:
            reason = (
                "the transient does not exist"
                if sub.outcome == TransientResult.NO_TRANSIENT
                else "terminated after reaching maximum bound"
            )
            return Verdict(BOUND_EXCEEDED, k=k, l=l, c=c, reason=reason)
        new_l, new_c = max(l, sub.l), lcm(c, sub.c)
        if (new_l, new_c) == (l, c):
            raise RuntimeError("incremental refinement made no progress")
        l, c = new_l, new_c


def _upfront(chk: _Checker, transient, stats) -> Verdict:
    tr = transient if transient is not None else trans_smt(chk.A, chk.X, chk.N, stats=stats)
    if not tr.is_found:
        reason = (
            "the transient does not exist"
            if tr.outcome == TransientResult.NO_TRANSIENT
            else "terminated after reaching maximum bound"
        )
        return Verdict(BOUND_EXCEEDED, reason=reason)
    l, c = tr.l, tr.c
    k = l + c - 1
    if k > chk.N:
        return Verdict(BOUND_EXCEEDED, k=k, l=l, c=c, reason="terminated after reaching maximum bound")
    model = chk.counterexample(k, l)
    if model is not None:
        return chk.invalid(model, k, l, c)
    return Verdict(VALID, k=k, l=l, c=c)


def check_all_variants(A, X, phi, N=1000):
    """Run every style x schedule combination; returns {(style, schedule): Verdict}."""
    out = {}
    tr = None
    for schedule in (INCREMENTAL, UPFRONT):
        for style in (UNROLLED, INITIALISED):
            v = mc(A, X, phi, N, style, schedule, transient=tr if schedule == UPFRONT else None)
            out[(style, schedule)] = v
            if schedule == UPFRONT and tr is None:
                tr = TransientResult.found(v.l, v.c) if v.l is not None else None
    return out


__all__ = [
    "Verdict", "mc", "check_all_variants", "VALID", "INVALID", "BOUND_EXCEEDED",
    "INCREMENTAL", "UPFRONT", "UNROLLED", "INITIALISED",
]
