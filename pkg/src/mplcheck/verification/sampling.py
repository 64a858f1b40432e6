"""Random points of an initial-condition set, used by oracles and the mock checker."""

from __future__ import annotations

import random
from fractions import Fraction

from ..smt.formula import bound, r_and
from ..smt.solver import DifferenceSolver
from ..tdltl.ast import Formula, Top
from ..tdltl.semantics import eval_initial
from .encode import decode_vector, initial_to_rdl, var_name


def random_rational(rng: random.Random, lo: int, hi: int, max_den: int = 4) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * q, hi * q), q)


def sample_initial(X: Formula, n: int, count: int, rng: random.Random | None = None, spread: int = 100):
    """Up to count distinct vectors satisfying X (fewer if X is very small)."""
    rng = rng or random.Random(0)
    if isinstance(X, Top):
        return [[random_rational(rng, -spread, spread) for _ in range(n)] for _ in range(count)]
    solver = DifferenceSolver()
    solver.add(initial_to_rdl(X))
    out = []
    seen = set()
    for _ in range(count):
        centre = [random_rational(rng, -spread, spread) for _ in range(n)]
        chosen = rng.sample(range(n), n)
        width = Fraction(rng.randint(1, spread))
        model = None
        while True:
            box = r_and(
                *[bound(var_name(i + 1, 0), ">=", centre[i] - width) for i in chosen],
                *[bound(var_name(i + 1, 0), "<=", centre[i] + width) for i in chosen],
            )
            solver.push()
            solver.add(box)
            res = solver.check()
            solver.pop()
            if res.is_sat:
                model = res.model
                break
            if not chosen:
                return out  # X itself is empty
            chosen = chosen[: len(chosen) // 2]
        x = decode_vector(model, n)
        assert eval_initial(X, x)
        key = tuple(x)
        if key not in seen:
            seen.add(key)
            out.append(x)
    return out
