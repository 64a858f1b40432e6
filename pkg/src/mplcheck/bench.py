"""Random benchmark instances: irreducible matrices and TDLTL formulas."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .errors import InfeasibleParams
from .graph import is_irreducible
from .maxplus import EPS, MaxPlusMatrix, format_matrix
from .tdltl.ast import And, Finally, Formula, Globally, Next, Or, Release, Until, atom
from .tdltl.printer import to_text

MAX_REJECTIONS = 1000
UNARY = (Next, Finally, Globally)
BINARY = (And, Or, Until, Release)
RELATIONS = (">", ">=", "<", "<=")


def random_entry(rng: random.Random) -> Fraction:
    """p/q with 1 <= p <= 100 and 1 <= q <= 5."""
    return Fraction(rng.randint(1, 100), rng.randint(1, 5))


def random_matrix(rng: random.Random, n: int, m: int) -> MaxPlusMatrix:
    """n x n matrix with m finite entries per row at random positions (maybe reducible)."""
    rows = []
    for _ in range(n):
        cols = set(rng.sample(range(n), m))
        rows.append([random_entry(rng) if j in cols else EPS for j in range(n)])
    return MaxPlusMatrix(rows)


def random_irreducible(rng: random.Random, n: int, m: int, cap: int = MAX_REJECTIONS) -> MaxPlusMatrix:
    if not 1 <= m <= n:
        raise InfeasibleParams(f"need 1 <= m <= n, got n={n}, m={m}")
    for _ in range(cap):
        A = random_matrix(rng, n, m)
        if is_irreducible(A):
            return A
    raise InfeasibleParams(f"no irreducible {n}x{n} matrix with {m} finite entries per row after {cap} draws")


@lru_cache(maxsize=None)
def skeleton_count(size: int) -> int:
    """Number of PNF operator skeletons with `size` nodes (atoms as leaves)."""
    if size < 1:
        return 0
    if size == 1:
        return 1
    total = len(UNARY) * skeleton_count(size - 1)
    total += len(BINARY) * sum(skeleton_count(a) * skeleton_count(size - 1 - a) for a in range(1, size - 1))
    return total


def random_atom(rng: random.Random, n: int) -> Formula:
    i = rng.randint(1, n)
    j = rng.randint(1, n - 1) if n > 1 else 1
    if n > 1 and j >= i:
        j += 1
    return atom(i, j, rng.choice(RELATIONS), rng.randint(-20, 20))


def random_formula(rng: random.Random, n: int, size: int) -> Formula:
    """Formula drawn uniformly among skeletons of the given size, atoms x_i - x_j ~ alpha."""
    if size < 1:
        raise ValueError("formula size must be positive")
    if size == 1:
        return random_atom(rng, n)
    unary = len(UNARY) * skeleton_count(size - 1)
    r = rng.randrange(skeleton_count(size))
    if r < unary:
        op = UNARY[r // skeleton_count(size - 1)]
        return op(random_formula(rng, n, size - 1))
    r -= unary
    for a in range(1, size - 1):
        block = skeleton_count(a) * skeleton_count(size - 1 - a)
        if r < len(BINARY) * block:
            op = BINARY[r // block]
            left, right = random_formula(rng, n, a), random_formula(rng, n, size - 1 - a)
            return op((left, right)) if op in (And, Or) else op(left, right)
        r -= len(BINARY) * block
    raise AssertionError("unreachable")


def generate(out_dir, n: int, m: int, count: int, seed: int, formulas: int = 0, size: int = 4):
    """Write matrix_XXXX.mat files (and formula_XXXX_Y.tdltl) to out_dir; returns the paths."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for idx in range(count):
        A = random_irreducible(rng, n, m)
        p = out / f"matrix_{idx:04d}.mat"
        p.write_text(format_matrix(A))
        written.append(p)
        for f in range(formulas):
            q = out / f"formula_{idx:04d}_{f}.tdltl"
            q.write_text(to_text(random_formula(rng, n, size)) + "\n")
            written.append(q)
    return written
