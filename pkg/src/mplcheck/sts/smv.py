"""A small parser and evaluator for the SMV subset the encoders emit.

It is used as a lint pass over generated models and by the sampling checker,
which replays concrete paths against the INIT, TRANS and LTLSPEC sections.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import SmvSyntaxError

SORTS = ("real", "boolean")

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<num>f'\d+/\d+|\d+\.\d+|\d+)
  | (?P<op><->|->|<=|>=|!=|[()!&|=<>+\-*/:;])
  | (?P<id>[A-Za-z_][A-Za-z0-9_$#]*)
    """,
    re.VERBOSE,
)

SECTIONS = {"MODULE", "VAR", "FROZENVAR", "INIT", "TRANS", "INVAR", "LTLSPEC"}
UNARY_LTL = {"X", "F", "G"}
BINARY_LTL = {"U", "V"}
KEYWORDS = SECTIONS | UNARY_LTL | BINARY_LTL | {"TRUE", "FALSE", "next", "real", "boolean"}


@dataclass
class SmvModule:
    name: str
    variables: dict = field(default_factory=dict)  # name -> sort
    frozen: set = field(default_factory=set)
    init: list = field(default_factory=list)
    trans: list = field(default_factory=list)
    invar: list = field(default_factory=list)
    specs: list = field(default_factory=list)


def parse_number(text: str) -> Fraction:
    """Numeral, decimal or f'p/q literal (also the bare p/q printed in traces)."""
    t = text.strip()
    neg = t.startswith("-")
    if neg:
        t = t[1:].strip()
    if t.startswith("f'"):
        t = t[2:]
    try:
        v = Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None
    return -v if neg else v


def tokenize(text: str, source=None):
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SmvSyntaxError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append((kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, tokens, source):
        self.toks = tokens
        self.i = 0
        self.source = source
        self.module = None
        self.section = None

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise SmvSyntaxError(msg, tok[2], tok[3], self.source)

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            self.fail(f"expected {value!r}, found {t[1] or 'end of input'!r}", t)
        return t

    # module structure

    def parse_module(self) -> SmvModule:
        self.expect("MODULE")
        name = self.take()
        if name[0] != "id":
            self.fail("expected a module name", name)
        mod = SmvModule(name[1])
        self.module = mod
        while self.peek()[0] != "eof":
            t = self.take()
            if t[1] in ("VAR", "FROZENVAR"):
                self._declarations(mod, frozen=t[1] == "FROZENVAR")
            elif t[1] in ("INIT", "TRANS", "INVAR", "LTLSPEC"):
                self.section = t[1]
                e = self.expr()
                if self.peek()[1] == ";":
                    self.take()
                target = {"INIT": mod.init, "TRANS": mod.trans, "INVAR": mod.invar, "LTLSPEC": mod.specs}[t[1]]
                target.append(e)
            else:
                self.fail(f"unexpected {t[1]!r} at top level", t)
        return mod

    def _declarations(self, mod, frozen):
        while self.peek()[0] == "id" and self.peek()[1] not in KEYWORDS:
            name = self.take()
            self.expect(":")
            sort = self.take()
            if sort[1] not in SORTS:
                self.fail(f"unsupported sort {sort[1]!r}", sort)
            self.expect(";")
            if name[1] in mod.variables:
                self.fail(f"variable {name[1]!r} declared twice", name)
            mod.variables[name[1]] = sort[1]
            if frozen:
                mod.frozen.add(name[1])

    # expressions, loosest binding first

    def expr(self):
        left = self.iff()
        if self.peek()[1] == "->":
            self.take()
            return ("->", left, self.expr())
        return left

    def iff(self):
        left = self.disj()
        while self.peek()[1] == "<->":
            self.take()
            left = ("<->", left, self.disj())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = ("|", left, self.conj())
        return left

    def conj(self):
        left = self.temporal()
        while self.peek()[1] == "&":
            self.take()
            left = ("&", left, self.temporal())
        return left

    def temporal(self):
        left = self.comparison()
        while self.peek()[1] in BINARY_LTL:
            t = self.take()
            self._require_ltl(t)
            left = (t[1], left, self.comparison())
        return left

    def comparison(self):
        left = self.additive()
        if self.peek()[1] in ("=", "!=", "<", "<=", ">", ">="):
            op = self.take()[1]
            return (op, left, self.additive())
        return left

    def additive(self):
        left = self.multiplicative()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            left = (op, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            left = (op, left, self.unary())
        return left

    def unary(self):
        t = self.peek()
        if t[1] == "!":
            self.take()
            return ("!", self.unary())
        if t[1] == "-":
            self.take()
            return ("neg", self.unary())
        if t[1] in UNARY_LTL:
            self.take()
            self._require_ltl(t)
            return (t[1], self.unary())
        return self.primary()

    def _require_ltl(self, tok):
        if self.section != "LTLSPEC":
            self.fail(f"temporal operator {tok[1]} outside LTLSPEC", tok)

    def primary(self):
        t = self.take()
        if t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "num":
            return ("num", parse_number(t[1]))
        if t[1] in ("TRUE", "FALSE"):
            return ("bool", t[1] == "TRUE")
        if t[1] == "next":
            if self.section != "TRANS":
                self.fail("next() is only allowed in TRANS", t)
            self.expect("(")
            v = self.take()
            self._declared(v)
            self.expect(")")
            return ("next", v[1])
        if t[0] == "id" and t[1] not in KEYWORDS:
            self._declared(t)
            return ("var", t[1])
        self.fail(f"unexpected {t[1] or 'end of input'!r}", t)

    def _declared(self, tok):
        if tok[0] != "id" or tok[1] not in self.module.variables:
            self.fail(f"undeclared identifier {tok[1]!r}", tok)


def parse_smv(text: str, source: str | None = None) -> SmvModule:
    """Parse and lint one module: every identifier must be declared, next() only in
    TRANS, temporal operators only in LTLSPEC. Raises SmvSyntaxError."""
    p = _Parser(tokenize(text, source), source)
    return p.parse_module()


# evaluation

_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}
_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_expr(e, cur: dict, nxt: dict | None = None):
    """Value of a state or transition expression under concrete assignments."""
    op = e[0]
    if op == "num":
        return e[1]
    if op == "bool":
        return e[1]
    if op == "var":
        return cur[e[1]]
    if op == "next":
        if nxt is None:
            raise ValueError("next() needs a successor state")
        return nxt[e[1]]
    if op == "neg":
        return -eval_expr(e[1], cur, nxt)
    if op == "!":
        return not eval_expr(e[1], cur, nxt)
    if op in _ARITH:
        return _ARITH[op](eval_expr(e[1], cur, nxt), eval_expr(e[2], cur, nxt))
    if op in _CMP:
        return _CMP[op](eval_expr(e[1], cur, nxt), eval_expr(e[2], cur, nxt))
    if op == "&":
        return eval_expr(e[1], cur, nxt) and eval_expr(e[2], cur, nxt)
    if op == "|":
        return eval_expr(e[1], cur, nxt) or eval_expr(e[2], cur, nxt)
    if op == "->":
        return (not eval_expr(e[1], cur, nxt)) or eval_expr(e[2], cur, nxt)
    if op == "<->":
        return eval_expr(e[1], cur, nxt) == eval_expr(e[2], cur, nxt)
    raise ValueError(f"temporal operator {op} in a state expression")


def eval_ltl(e, states: list, loop: int) -> bool:
    """Truth of an LTL expression at position 0 of the lasso states[0..] with
    states[-1] followed by states[loop]."""
    n = len(states)
    if not 0 <= loop < n:
        raise ValueError("loop index out of range")
    succ = [t + 1 for t in range(n - 1)] + [loop]
    memo = {}

    def sat(g):
        key = id(g)
        if key in memo:
            return memo[key][0]
        op = g[0]
        if op == "X":
            a = sat(g[1])
            r = [a[succ[t]] for t in range(n)]
        elif op in ("F", "G", "U", "V"):
            if op == "F":
                a, b, least = [True] * n, sat(g[1]), True
            elif op == "G":
                a, b, least = [False] * n, sat(g[1]), False
            else:
                a, b, least = sat(g[1]), sat(g[2]), op == "U"
            r = [not least] * n
            changed = True
            while changed:
                changed = False
                for t in reversed(range(n)):
                    if least:
                        v = b[t] or (a[t] and r[succ[t]])
                    else:
                        v = b[t] and (a[t] or r[succ[t]])
                    if v != r[t]:
                        r[t] = v
                        changed = True
        elif op == "!":
            r = [not v for v in sat(g[1])]
        elif op in ("&", "|", "->", "<->") and _is_temporal(g):
            a, b = sat(g[1]), sat(g[2])
            fn = {
                "&": lambda x, y: x and y,
                "|": lambda x, y: x or y,
                "->": lambda x, y: (not x) or y,
                "<->": lambda x, y: x == y,
            }[op]
            r = [fn(x, y) for x, y in zip(a, b)]
        else:
            r = [bool(eval_expr(g, states[t], states[succ[t]])) for t in range(n)]
        memo[key] = (r, g)
        return r

    return sat(e)[0]


def _is_temporal(e) -> bool:
    if not isinstance(e, tuple):
        return False
    if e[0] in UNARY_LTL or e[0] in BINARY_LTL:
        return True
    return any(_is_temporal(c) for c in e[1:] if isinstance(c, tuple))


def next_depth(e) -> int:
    """Deepest nesting of X, or None when F, G, U or V occur."""
    op = e[0]
    if op in ("F", "G", "U", "V"):
        return None
    kids = [c for c in e[1:] if isinstance(c, tuple)]
    depths = [next_depth(c) for c in kids]
    if any(d is None for d in depths):
        return None
    inner = max(depths, default=0)
    return inner + 1 if op == "X" else inner
