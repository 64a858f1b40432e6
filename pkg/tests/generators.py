"""Random instance generators shared by the property and acceptance tests."""

import random
from fractions import Fraction

from mplcheck.smt import ZERO, diff, r_and, r_not, r_or

RELS = (">", ">=", "=", "<", "<=")


def random_rdl(rng: random.Random, max_vars: int = 12, max_atoms: int = 30):
    """Random QF-RDL formula: a conjunction of small clauses over difference atoms.

    Constants are small rationals and a quarter of the atoms bound a single
    variable against zero, so both verdicts come up about equally often.
    """
    nv = rng.randint(2, max_vars)
    names = [f"v{i}" for i in range(nv)]
    total = rng.randint(max(3, nv), max_atoms)
    clauses, used = [], 0
    while used < total:
        width = min(rng.choice((1, 1, 1, 1, 2, 2, 3)), total - used)
        lits = []
        for _ in range(width):
            vi = rng.choice(names)
            vj = ZERO if rng.random() < 0.25 else rng.choice([v for v in names if v != vi])
            c = Fraction(rng.randint(-8, 5), rng.choice((1, 1, 2, 3)))
            a = diff(vi, vj, rng.choice(RELS), c)
            lits.append(r_not(a) if rng.random() < 0.2 else a)
        clauses.append(r_or(*lits))
        used += width
    return r_and(*clauses)


def replay_violation(A, phi, verdict) -> bool:
    """Whether an Invalid verdict's witness really is a lasso violating phi.

    The witness lasso is checked on the simulated orbit, then phi is
    evaluated both on that lasso and on the first lasso detect_lasso finds.
    """
    from mplcheck.orbit import detect_lasso, shift_of, simulate
    from mplcheck.tdltl import eval_bounded

    x0, w = verdict.counterexample, verdict.lasso
    xs = [s.to_list() for s in simulate(A, x0, w.k + 1).states]
    if shift_of(xs[w.k + 1], xs[w.l]) != w.alpha:
        return False
    first = detect_lasso(simulate(A, x0, w.k + 1))
    return not eval_bounded(A, x0, phi, w.k, w.l) and not eval_bounded(A, x0, phi, first.k, first.l)


def falsify(A, X, phi, samples: int = 100, seed: int = 0):
    """A sampled initial vector from X whose orbit violates phi, or None."""
    from mplcheck.tdltl import holds
    from mplcheck.verification import sample_initial

    rng = random.Random(seed)
    spreads = (10, 100, 1000)
    per = -(-samples // len(spreads))
    for spread in spreads:
        for x in sample_initial(X, A.rows, per, rng, spread):
            if not holds(A, x, phi):
                return x
    return None
