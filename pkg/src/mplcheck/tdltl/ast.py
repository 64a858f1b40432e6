"""Immutable syntax trees for TD formulas, TDLTL formulas and initial-condition sets.

Variables are 1-based as in the surface syntax. Index 0 denotes the constant
zero and only occurs in initial-condition bounds such as ``x1 >= 0``.
"""

from __future__ import annotations

from fractions import Fraction

from .._tree import Node, node


class Formula(Node):
    __slots__ = ()

    def __str__(self):
        from .printer import to_text

        return to_text(self)


@node
class Top(Formula):
    pass


@node
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@node
class Atom(Formula):
    """x_i^(k) - x_j^(l) > alpha (strict) or >= alpha (non-strict)."""

    i: int
    j: int
    k: int
    l: int
    strict: bool
    alpha: Fraction

    def __post_init__(self):
        if not isinstance(self.alpha, Fraction):
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.k < 0 or self.l < 0:
            raise ValueError("time offsets must be non-negative")

    @property
    def rel(self):
        return ">" if self.strict else ">="

    @property
    def is_initial(self):
        return self.k == 0 and self.l == 0

    def negated(self) -> "Atom":
        return Atom(self.j, self.i, self.l, self.k, not self.strict, -self.alpha)

    def shifted(self, m: int) -> "Atom":
        if m == 0:
            return self
        return Atom(self.i, self.j, self.k + m, self.l + m, self.strict, self.alpha)


@node
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@node
class And(Formula):
    args: tuple

    def children(self):
        return self.args


@node
class Or(Formula):
    args: tuple

    def children(self):
        return self.args


@node
class Next(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@node
class Finally(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@node
class Globally(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@node
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@node
class Release(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


def atom(i, j, rel, alpha, k=0, l=0) -> Formula:
    """Build an atom from any surface relation; <, <= and = are desugared."""
    alpha = Fraction(alpha)
    if rel == ">":
        return Atom(i, j, k, l, True, alpha)
    if rel == ">=":
        return Atom(i, j, k, l, False, alpha)
    if rel == "<":
        return Atom(j, i, l, k, True, -alpha)
    if rel == "<=":
        return Atom(j, i, l, k, False, -alpha)
    if rel == "=":
        return conj(Atom(i, j, k, l, False, alpha), Atom(j, i, l, k, False, -alpha))
    raise ValueError(f"unknown relation {rel!r}")


def _flatten(cls, args):
    out = []
    seen = set()
    for a in args:
        parts = a.args if isinstance(a, cls) else (a,)
        for p in parts:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def conj(*args) -> Formula:
    if len(args) == 1 and not isinstance(args[0], Formula):
        args = tuple(args[0])
    if any(a is FALSE or isinstance(a, Bottom) for a in args):
        return FALSE
    parts = [a for a in _flatten(And, args) if not isinstance(a, Top)]
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(*args) -> Formula:
    if len(args) == 1 and not isinstance(args[0], Formula):
        args = tuple(args[0])
    if any(isinstance(a, Top) for a in args):
        return TRUE
    parts = [a for a in _flatten(Or, args) if not isinstance(a, Bottom)]
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def negate(phi: Formula) -> Formula:
    """Positive-normal-form negation: dualise operators and negate atoms."""
    memo = {}

    def go(f):
        r = memo.get(id(f))
        if r is not None:
            return r
        if isinstance(f, Top):
            r = FALSE
        elif isinstance(f, Bottom):
            r = TRUE
        elif isinstance(f, Atom):
            r = f.negated()
        elif isinstance(f, Not):
            r = to_pnf(f.arg)
        elif isinstance(f, And):
            r = disj(*[go(a) for a in f.args])
        elif isinstance(f, Or):
            r = conj(*[go(a) for a in f.args])
        elif isinstance(f, Next):
            r = Next(go(f.arg))
        elif isinstance(f, Finally):
            r = Globally(go(f.arg))
        elif isinstance(f, Globally):
            r = Finally(go(f.arg))
        elif isinstance(f, Until):
            r = Release(go(f.left), go(f.right))
        elif isinstance(f, Release):
            r = Until(go(f.left), go(f.right))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[id(f)] = r
        return r

    return go(phi)


def to_pnf(phi: Formula) -> Formula:
    """Eliminate Not nodes by pushing them onto atoms."""
    if isinstance(phi, (Top, Bottom, Atom)):
        return phi
    if isinstance(phi, Not):
        return negate(phi.arg)
    return map_children(phi, to_pnf)


def map_children(f: Formula, fn) -> Formula:
    if isinstance(f, And):
        return conj(*[fn(a) for a in f.args])
    if isinstance(f, Or):
        return disj(*[fn(a) for a in f.args])
    if isinstance(f, (Next, Finally, Globally, Not)):
        return type(f)(fn(f.arg))
    if isinstance(f, (Until, Release)):
        return type(f)(fn(f.left), fn(f.right))
    return f


def map_atoms(f: Formula, fn) -> Formula:
    """Replace every atom a by fn(a), keeping the rest of the tree."""
    memo = {}

    def go(g):
        r = memo.get(id(g))
        if r is None:
            r = fn(g) if isinstance(g, Atom) else map_children(g, go)
            memo[id(g)] = (r, g)
            return r
        return r[0]

    return go(f)


def atoms(f: Formula):
    """All distinct atoms of a formula, in first-occurrence order."""
    seen = {}
    stack = [f]
    visited = set()
    while stack:
        g = stack.pop()
        if id(g) in visited:
            continue
        visited.add(id(g))
        if isinstance(g, Atom):
            seen.setdefault(g, None)
        else:
            stack.extend(reversed(g.children()))
    return list(seen)


def size(f: Formula) -> int:
    """Number of nodes, counting n-ary And/Or as n-1 binary operators."""
    if isinstance(f, (Atom, Top, Bottom)):
        return 1
    kids = f.children()
    own = max(len(kids) - 1, 1) if isinstance(f, (And, Or)) else 1
    return own + sum(size(c) for c in kids)


def is_temporal(f: Formula) -> bool:
    if isinstance(f, (Next, Finally, Globally, Until, Release)):
        return True
    return any(is_temporal(c) for c in f.children())


def max_index(f: Formula) -> int:
    return max((max(a.i, a.j) for a in atoms(f)), default=0)


def max_offset(f: Formula) -> int:
    return max((max(a.k, a.l) for a in atoms(f)), default=0)
