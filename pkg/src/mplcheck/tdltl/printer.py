"""Render formulas back into the surface syntax accepted by the parser."""

from __future__ import annotations

from fractions import Fraction

from .ast import And, Atom, Bottom, Finally, Globally, Next, Not, Or, Release, Top, Until


def format_number(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_term(i: int, k: int) -> str:
    return f"x{i}" if k == 0 else f"x{i}^({k})"


def format_atom(a: Atom) -> str:
    if a.i == 0 and a.j == 0:
        raise ValueError("atom between two zero terms")
    if a.j == 0:
        return f"{format_term(a.i, a.k)} {a.rel} {format_number(a.alpha)}"
    if a.i == 0:
        rel = "<" if a.strict else "<="
        return f"{format_term(a.j, a.l)} {rel} {format_number(-a.alpha)}"
    return f"{format_term(a.i, a.k)} - {format_term(a.j, a.l)} {a.rel} {format_number(a.alpha)}"


_PREC = {Or: 1, And: 2, Until: 3, Release: 3}


def _prec(f):
    return _PREC.get(type(f), 4)


def to_text(f) -> str:
    if isinstance(f, Top):
        return "TRUE"
    if isinstance(f, Bottom):
        return "FALSE"
    if isinstance(f, Atom):
        return format_atom(f)
    if isinstance(f, (Not, Next, Finally, Globally)):
        op = {Not: "!", Next: "X", Finally: "F", Globally: "G"}[type(f)]
        return f"{op}({to_text(f.arg)})"
    if isinstance(f, (And, Or)):
        sep = " & " if isinstance(f, And) else " | "
        mine = _prec(f)
        parts = []
        for a in f.args:
            s = to_text(a)
            parts.append(f"({s})" if _prec(a) <= mine else s)
        return sep.join(parts)
    if isinstance(f, (Until, Release)):
        op = "U" if isinstance(f, Until) else "R"
        return f"({to_text(f.left)}) {op} ({to_text(f.right)})"
    raise TypeError(f"not a formula: {f!r}")
