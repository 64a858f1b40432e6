"""Recursive-descent parser for TDLTL formulas and initial-condition sets.

Precedence from loosest to tightest: ``|``, ``&``, ``U``/``R`` (right
associative), then the prefix operators ``!``, ``X``, ``F``, ``G``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import FormulaSyntaxError, IndexOutOfRange
from .ast import (
    FALSE,
    TRUE,
    Atom,
    Finally,
    Formula,
    Globally,
    Next,
    Not,
    Release,
    Until,
    atom,
    atoms,
    conj,
    disj,
    to_pnf,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<var>x\d+)
  | (?P<kw>TRUE|FALSE|true|false)
  | (?P<op>>=|<=|\^\(|[><=\-+!&|()XFGUR])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def _tokenize(text, source):
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source
            )
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_REL = (">", ">=", "<", "<=", "=")


class _Parser:
    def __init__(self, text, source, initial):
        self.toks = _tokenize(text, source)
        self.pos = 0
        self.source = source
        self.initial = initial

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FormulaSyntaxError(f"{msg}, found {found}", tok.line, tok.col, self.source)

    def expect(self, text):
        t = self.peek()
        if t.text != text or t.kind == "eof":
            self.error(f"expected {text!r}")
        return self.take()

    def parse(self):
        if self.peek().kind == "eof":
            self.error("empty formula")
        f = self.parse_or()
        if self.peek().kind != "eof":
            self.error("unexpected trailing input")
        return f

    def parse_or(self):
        parts = [self.parse_and()]
        while self.peek().text == "|":
            self.take()
            parts.append(self.parse_and())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def parse_and(self):
        parts = [self.parse_ur()]
        while self.peek().text == "&":
            self.take()
            parts.append(self.parse_ur())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def parse_ur(self):
        left = self.parse_unary()
        t = self.peek()
        if t.kind == "op" and t.text in ("U", "R"):
            if self.initial:
                self.error("temporal operators are not allowed in initial conditions")
            self.take()
            right = self.parse_ur()
            return Until(left, right) if t.text == "U" else Release(left, right)
        return left

    def parse_unary(self):
        t = self.peek()
        if t.kind == "op" and t.text in ("!", "X", "F", "G"):
            if self.initial and t.text != "!":
                self.error("temporal operators are not allowed in initial conditions")
            self.take()
            arg = self.parse_unary()
            return {"!": Not, "X": Next, "F": Finally, "G": Globally}[t.text](arg)
        return self.parse_primary()

    def parse_primary(self):
        t = self.peek()
        if t.kind == "kw":
            self.take()
            return TRUE if t.text.upper() == "TRUE" else FALSE
        if t.text == "(":
            self.take()
            f = self.parse_or()
            self.expect(")")
            return f
        if t.kind == "var":
            return self.parse_atom()
        self.error("expected a formula")

    def parse_term(self):
        t = self.take()
        if t.kind != "var":
            self.error("expected a variable such as x1", t)
        idx = int(t.text[1:])
        if idx == 0:
            raise IndexOutOfRange(f"variable indices start at 1 (line {t.line}, column {t.col})")
        offset = 0
        if self.peek().text == "^(":
            self.take()
            o = self.take()
            if o.kind != "num" or not o.text.isdigit():
                self.error("expected a non-negative integer offset", o)
            offset = int(o.text)
            self.expect(")")
        return idx, offset, t

    def parse_number(self):
        sign = 1
        while self.peek().text in ("-", "+"):
            if self.take().text == "-":
                sign = -sign
        t = self.take()
        if t.kind != "num":
            self.error("expected a number", t)
        num, _, den = t.text.partition("/")
        if den and int(den) == 0:
            self.error("zero denominator", t)
        value = Fraction(num) / (int(den) if den else 1)
        return sign * value

    def parse_atom(self):
        i, k, tok_i = self.parse_term()
        if self.peek().text == "-":
            self.take()
            j, l, _ = self.parse_term()
        else:
            if not self.initial:
                self.error("expected '-' and a second term (atoms compare two variables)")
            j, l = 0, 0
        rel = self.take()
        if rel.text not in _REL:
            self.error("expected a relation (>, >=, <, <=, =)", rel)
        alpha = self.parse_number()
        if self.initial and (k or l):
            self.error("time offsets are not allowed in initial conditions", tok_i)
        return atom(i, j, rel.text, alpha, k, l)


def _bind(f: Formula, n, allow_zero):
    if n is None:
        for a in atoms(f):
            for idx in (a.i, a.j):
                if idx == 0 and not allow_zero:
                    raise IndexOutOfRange("variable indices start at 1")
        return f
    for a in atoms(f):
        for idx in (a.i, a.j):
            if idx > n or (idx == 0 and not allow_zero):
                raise IndexOutOfRange(f"variable x{idx} is outside x1..x{n}")
    return f


def parse_tdltl(text: str, n: int | None = None, source: str | None = None) -> Formula:
    """Parse a TDLTL formula and return it in positive normal form."""
    f = to_pnf(_Parser(text, source, initial=False).parse())
    return _bind(f, n, allow_zero=False)


def parse_initial(text: str, n: int | None = None, source: str | None = None) -> Formula:
    """Parse an initial-condition set (offset-free atoms and single-variable bounds)."""
    f = to_pnf(_Parser(text, source, initial=True).parse())
    return _bind(f, n, allow_zero=True)


def bind(f: Formula, n: int) -> Formula:
    """Check that every variable index fits dimension n."""
    return _bind(f, n, allow_zero=True)
