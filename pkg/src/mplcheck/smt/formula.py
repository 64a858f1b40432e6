"""Quantifier-free rational difference logic formulas.

Variables are plain strings. ``ZERO`` is the designated variable whose value
is fixed to 0, so single-variable bounds read ``v - ZERO >= c``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .._tree import Node, node

ZERO = "0"


class RdlFormula(Node):
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@node
class RTrue(RdlFormula):
    pass


@node
class RFalse(RdlFormula):
    pass


TRUE = RTrue()
FALSE = RFalse()


@node
class RAtom(RdlFormula):
    """vi - vj rel c with rel one of '>', '>=', '='."""

    vi: str
    vj: str
    rel: str
    c: Fraction

    def __post_init__(self):
        if self.rel not in (">", ">=", "="):
            raise ValueError(f"relation must be >, >= or =, got {self.rel!r}")
        if not isinstance(self.c, Fraction):
            object.__setattr__(self, "c", Fraction(self.c))


@node
class RNot(RdlFormula):
    arg: RdlFormula

    def children(self):
        return (self.arg,)


@node
class RAnd(RdlFormula):
    args: tuple

    def children(self):
        return self.args


@node
class ROr(RdlFormula):
    args: tuple

    def children(self):
        return self.args


def diff(vi: str, vj: str, rel: str, c) -> RdlFormula:
    """Atom vi - vj rel c, accepting <, <= by mirroring."""
    c = Fraction(c)
    if rel in (">", ">=", "="):
        return RAtom(vi, vj, rel, c)
    if rel == "<":
        return RAtom(vj, vi, ">", -c)
    if rel == "<=":
        return RAtom(vj, vi, ">=", -c)
    raise ValueError(f"unknown relation {rel!r}")


def bound(v: str, rel: str, c) -> RdlFormula:
    return diff(v, ZERO, rel, c)


def _gather(cls, args):
    out, seen = [], set()
    for a in args:
        for p in a.args if isinstance(a, cls) else (a,):
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def r_and(*args) -> RdlFormula:
    if len(args) == 1 and not isinstance(args[0], RdlFormula):
        args = tuple(args[0])
    if any(isinstance(a, RFalse) for a in args):
        return FALSE
    parts = [a for a in _gather(RAnd, args) if not isinstance(a, RTrue)]
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else RAnd(tuple(parts))


def r_or(*args) -> RdlFormula:
    if len(args) == 1 and not isinstance(args[0], RdlFormula):
        args = tuple(args[0])
    if any(isinstance(a, RTrue) for a in args):
        return TRUE
    parts = [a for a in _gather(ROr, args) if not isinstance(a, RFalse)]
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else ROr(tuple(parts))


def r_not(f: RdlFormula) -> RdlFormula:
    if isinstance(f, RTrue):
        return FALSE
    if isinstance(f, RFalse):
        return TRUE
    if isinstance(f, RNot):
        return f.arg
    return RNot(f)


def _walk(f):
    stack, visited = [f], set()
    while stack:
        g = stack.pop()
        if id(g) in visited:
            continue
        visited.add(id(g))
        yield g
        stack.extend(g.children())


def variables(f: RdlFormula) -> list:
    """Sorted variable names of f, excluding ZERO."""
    names = set()
    for g in _walk(f):
        if isinstance(g, RAtom):
            names.add(g.vi)
            names.add(g.vj)
    names.discard(ZERO)
    return sorted(names, key=_natural_key)


def _natural_key(name):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def rdl_atoms(f: RdlFormula) -> list:
    return [g for g in _walk(f) if isinstance(g, RAtom)]


def evaluate(f: RdlFormula, model: dict, memo: dict | None = None) -> bool:
    """Truth of f under model; ZERO and unmentioned variables read as 0.

    A memo dict may be shared between calls over the same model.
    """
    memo = {} if memo is None else memo

    def val(v):
        return Fraction(0) if v == ZERO else model.get(v, Fraction(0))

    def go(g):
        r = memo.get(id(g))
        if r is not None:
            return r
        if isinstance(g, RTrue):
            r = True
        elif isinstance(g, RFalse):
            r = False
        elif isinstance(g, RAtom):
            d = val(g.vi) - val(g.vj)
            r = d > g.c if g.rel == ">" else d >= g.c if g.rel == ">=" else d == g.c
        elif isinstance(g, RNot):
            r = not go(g.arg)
        elif isinstance(g, RAnd):
            r = all(go(a) for a in g.args)
        elif isinstance(g, ROr):
            r = any(go(a) for a in g.args)
        else:
            raise TypeError(f"not an RDL formula: {g!r}")
        memo[id(g)] = r
        return r

    return go(f)


def to_text(f: RdlFormula) -> str:
    if isinstance(f, RTrue):
        return "true"
    if isinstance(f, RFalse):
        return "false"
    if isinstance(f, RAtom):
        lhs = f.vi if f.vj == ZERO else f"{f.vi} - {f.vj}"
        return f"{lhs} {f.rel} {f.c}"
    if isinstance(f, RNot):
        return f"!({to_text(f.arg)})"
    sep = " & " if isinstance(f, RAnd) else " | "
    return "(" + sep.join(to_text(a) for a in f.args) + ")"


def formula_size(f: RdlFormula) -> int:
    return sum(1 for _ in _walk(f))
