"""Exact max-plus arithmetic over rationals extended with epsilon."""

from __future__ import annotations

import re
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, MatrixParseError, NotRegular


class Epsilon:
    """The max-plus zero (minus infinity). A tag, never a number."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EPS"

    def __str__(self):
        return "e"

    def __reduce__(self):
        return (Epsilon, ())


EPS = Epsilon()

Scalar = Union[Fraction, Epsilon]


def scalar(value) -> Scalar:
    """Coerce ints, Fractions, EPS, None or text ('e', '3', '7/5') to a scalar."""
    if value is EPS or value is None:
        return EPS
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not max-plus scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use Fraction or text")
    raise TypeError(f"cannot interpret {value!r} as a max-plus scalar")


_NUM = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_DEC = re.compile(r"^[+-]?\d+\.\d*$|^[+-]?\.\d+$")


def parse_scalar(token: str) -> Scalar:
    token = token.strip()
    if token in ("e", "E", "eps", "-inf"):
        return EPS
    m = _NUM.match(token)
    if m:
        num, den = int(m.group(1)), m.group(2)
        if den is None:
            return Fraction(num)
        den = int(den)
        if den == 0:
            raise ValueError(f"zero denominator in {token!r}")
        return Fraction(num, den)
    if _DEC.match(token):
        return Fraction(token)
    raise ValueError(f"not a max-plus scalar: {token!r}")


def format_scalar(a: Scalar) -> str:
    if a is EPS:
        return "e"
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def is_eps(a: Scalar) -> bool:
    return a is EPS


def mp_add(a: Scalar, b: Scalar) -> Scalar:
    if a is EPS:
        return b
    if b is EPS:
        return a
    return a if a >= b else b


def mp_mul(a: Scalar, b: Scalar) -> Scalar:
    if a is EPS or b is EPS:
        return EPS
    return a + b


def mp_sum(values: Iterable[Scalar]) -> Scalar:
    """Max-plus sum of a sequence (EPS for an empty one)."""
    best: Scalar = EPS
    for v in values:
        if v is not EPS and (best is EPS or v > best):
            best = v
    return best


class MaxPlusMatrix:
    """Immutable rows x cols grid of max-plus scalars."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: Sequence[Sequence]):
        grid = tuple(tuple(scalar(v) for v in row) for row in rows)
        if not grid:
            raise DimensionMismatch("a matrix needs at least one row")
        width = len(grid[0])
        if width == 0 or any(len(r) != width for r in grid):
            raise DimensionMismatch("rows must be nonempty and of equal length")
        self.rows = len(grid)
        self.cols = width
        self.entries = grid
        self._hash = None

    @classmethod
    def _raw(cls, grid):
        # trusted constructor: grid is already a tuple of tuples of scalars
        obj = object.__new__(cls)
        obj.rows = len(grid)
        obj.cols = len(grid[0])
        obj.entries = grid
        obj._hash = None
        return obj

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, MaxPlusMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(a) for a in row) for row in self.entries)
        return f"MaxPlusMatrix([{body}])"

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    def row(self, i):
        return self.entries[i]

    def column(self, j) -> "MaxPlusMatrix":
        return MaxPlusMatrix._raw(tuple((r[j],) for r in self.entries))

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def to_list(self):
        """Entries of a vector (single column) as a flat list."""
        if self.cols != 1:
            raise DimensionMismatch("to_list needs a column vector")
        return [r[0] for r in self.entries]

    def __matmul__(self, other):
        return mat_mul(self, other)


def matrix(rows) -> MaxPlusMatrix:
    return MaxPlusMatrix(rows)


def vector(values) -> MaxPlusMatrix:
    """Column vector from a flat list of scalars."""
    return MaxPlusMatrix([[v] for v in values])


def identity(n: int) -> MaxPlusMatrix:
    zero = Fraction(0)
    return MaxPlusMatrix._raw(
        tuple(tuple(zero if i == j else EPS for j in range(n)) for i in range(n))
    )


def epsilon_matrix(rows: int, cols: int) -> MaxPlusMatrix:
    return MaxPlusMatrix._raw(tuple((EPS,) * cols for _ in range(rows)))


def mat_mul(C: MaxPlusMatrix, D: MaxPlusMatrix) -> MaxPlusMatrix:
    if C.cols != D.rows:
        raise DimensionMismatch(f"cannot multiply {C.shape} by {D.shape}")
    dcols = list(zip(*D.entries))
    out = []
    for crow in C.entries:
        finite = [(k, a) for k, a in enumerate(crow) if a is not EPS]
        row = []
        for dcol in dcols:
            best = EPS
            for k, a in finite:
                b = dcol[k]
                if b is not EPS:
                    s = a + b
                    if best is EPS or s > best:
                        best = s
            row.append(best)
        out.append(tuple(row))
    return MaxPlusMatrix._raw(tuple(out))


def mat_add(C: MaxPlusMatrix, D: MaxPlusMatrix) -> MaxPlusMatrix:
    if C.shape != D.shape:
        raise DimensionMismatch(f"cannot add {C.shape} and {D.shape}")
    return MaxPlusMatrix._raw(
        tuple(tuple(mp_add(a, b) for a, b in zip(r, s)) for r, s in zip(C.entries, D.entries))
    )


def scalar_mat_mul(alpha, A: MaxPlusMatrix) -> MaxPlusMatrix:
    alpha = scalar(alpha)
    return MaxPlusMatrix._raw(tuple(tuple(mp_mul(alpha, a) for a in r) for r in A.entries))


def mat_power(A: MaxPlusMatrix, t: int) -> MaxPlusMatrix:
    if not A.is_square:
        raise DimensionMismatch("matrix powers need a square matrix")
    if t < 0:
        raise ValueError("negative power")
    return powers_of(A)[t]


class MatrixPowers:
    """Lazily extended cache of A^0, A^1, ... for one square matrix."""

    def __init__(self, A: MaxPlusMatrix):
        if not A.is_square:
            raise DimensionMismatch("matrix powers need a square matrix")
        self.matrix = A
        self._powers = [identity(A.rows)]

    def __getitem__(self, t: int) -> MaxPlusMatrix:
        if t < 0:
            raise ValueError("negative power")
        while len(self._powers) <= t:
            self._powers.append(mat_mul(self.matrix, self._powers[-1]))
        return self._powers[t]


@lru_cache(maxsize=64)
def powers_of(A: MaxPlusMatrix) -> "MatrixPowers":
    """Shared power cache, so repeated mat_power calls walk the sequence once."""
    return MatrixPowers(A)


def is_regular(A: MaxPlusMatrix) -> bool:
    return all(any(a is not EPS for a in row) for row in A.entries)


def require_regular(A: MaxPlusMatrix):
    if not is_regular(A):
        raise NotRegular("every row needs at least one finite entry")


def require_square(A: MaxPlusMatrix):
    if not A.is_square:
        raise DimensionMismatch(f"expected a square matrix, got {A.shape}")


def parse_matrix(text: str, source: str | None = None) -> MaxPlusMatrix:
    """Parse the `n m` header plus n rows of m entries format."""
    lines = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise MatrixParseError("empty matrix file", source=source)
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise MatrixParseError("header must be two counts `n m`", no, 1, source)
    n, m = int(parts[0]), int(parts[1])
    if n < 1 or m < 1:
        raise MatrixParseError("dimensions must be positive", no, 1, source)
    body = lines[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] if body else no)
        raise MatrixParseError(f"expected {n} rows, found {len(body)}", where, None, source)
    rows = []
    for no, ln in body:
        raw_line = text.splitlines()[no - 1]
        tokens = ln.split()
        if len(tokens) != m:
            raise MatrixParseError(f"expected {m} entries, found {len(tokens)}", no, None, source)
        row = []
        col = 0
        for tok in tokens:
            col = raw_line.index(tok, col) + 1
            try:
                row.append(parse_scalar(tok))
            except ValueError as exc:
                raise MatrixParseError(str(exc), no, col, source) from None
            col += len(tok) - 1
        rows.append(row)
    return MaxPlusMatrix(rows)


def format_matrix(A: MaxPlusMatrix) -> str:
    lines = [f"{A.rows} {A.cols}"]
    lines += [" ".join(format_scalar(a) for a in row) for row in A.entries]
    return "\n".join(lines) + "\n"
