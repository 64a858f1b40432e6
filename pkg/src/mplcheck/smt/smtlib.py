"""SMT-LIB2 emission and a bridge to external solvers speaking it on stdin/stdout."""

from __future__ import annotations

import re
import shlex
import shutil
import subprocess
from fractions import Fraction

from ..errors import ProtocolError, SolverCrashed, SolverTimeout
from .formula import ZERO, RAnd, RAtom, RdlFormula, RFalse, RNot, ROr, RTrue, variables
from .solver import SolverResult, Status

ZERO_SYMBOL = "mpl.zero"
_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")


def symbol(name: str) -> str:
    if name == ZERO:
        return ZERO_SYMBOL
    if _SIMPLE.match(name):
        return name
    if "|" in name or "\\" in name:
        raise ValueError(f"variable name {name!r} cannot be quoted in SMT-LIB")
    return f"|{name}|"


def constant(c: Fraction) -> str:
    c = Fraction(c)
    mag = abs(c)
    body = str(mag.numerator) if mag.denominator == 1 else f"(/ {mag.numerator} {mag.denominator})"
    return f"(- {body})" if c < 0 else body


def _term(f: RdlFormula, out: list):
    # iterative to survive deep trees; emits into out
    stack = [("enter", f)]
    while stack:
        kind, g = stack.pop()
        if kind == "text":
            out.append(g)
            continue
        if isinstance(g, RTrue):
            out.append("true")
        elif isinstance(g, RFalse):
            out.append("false")
        elif isinstance(g, RAtom):
            out.append(f"({g.rel} (- {symbol(g.vi)} {symbol(g.vj)}) {constant(g.c)})")
        elif isinstance(g, RNot):
            out.append("(not ")
            stack.append(("text", ")"))
            stack.append(("enter", g.arg))
        elif isinstance(g, (RAnd, ROr)):
            out.append("(and" if isinstance(g, RAnd) else "(or")
            stack.append(("text", ")"))
            for a in reversed(g.args):
                stack.append(("enter", a))
                stack.append(("text", " "))
        else:
            raise TypeError(f"not an RDL formula: {g!r}")


def emit_smtlib2(f: RdlFormula) -> str:
    """Script declaring every variable, asserting f, then check-sat and get-value."""
    names = variables(f)
    lines = ["(set-option :produce-models true)", "(set-logic QF_RDL)", f"(declare-fun {ZERO_SYMBOL} () Real)"]
    lines += [f"(declare-fun {symbol(v)} () Real)" for v in names]
    body = []
    _term(f, body)
    lines.append(f"(assert {''.join(body)})")
    lines.append("(check-sat)")
    lines.append(f"(get-value ({' '.join([ZERO_SYMBOL] + [symbol(v) for v in names])}))")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


_SEXP_TOKEN = re.compile(r"\s*(\(|\)|\|[^|]*\||\"(?:[^\"]|\"\")*\"|[^\s()|\"]+)")


def parse_sexps(text: str) -> list:
    out, stack = [], []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _SEXP_TOKEN.match(text, pos)
        if not m:
            raise ProtocolError(f"cannot tokenise solver output near {text[pos:pos + 20]!r}")
        tok = m.group(1)
        pos = m.end()
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ProtocolError("unbalanced ')' in solver output")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise ProtocolError("unbalanced '(' in solver output")
    return out


def value_of(sexp) -> Fraction:
    """Exact value of a numeral, decimal, (- v) or (/ a b) term."""
    if isinstance(sexp, str):
        try:
            return Fraction(sexp)
        except ValueError:
            raise ProtocolError(f"unexpected value {sexp!r}") from None
    if len(sexp) == 2 and sexp[0] == "-":
        return -value_of(sexp[1])
    if len(sexp) == 3 and sexp[0] == "/":
        den = value_of(sexp[2])
        if den == 0:
            raise ProtocolError("division by zero in model value")
        return value_of(sexp[1]) / den
    raise ProtocolError(f"unexpected value term {sexp!r}")


def _unquote(s: str) -> str:
    if s.startswith("|") and s.endswith("|"):
        return s[1:-1]
    return s


def parse_response(text: str, names: list) -> SolverResult:
    items = parse_sexps(text)
    errors = [x for x in items if isinstance(x, list) and x and x[0] == "error"]
    if not items:
        raise ProtocolError("empty solver response")
    head = items[0]
    if head == "unsat":
        return SolverResult(Status.UNSAT)
    if head == "unknown":
        return SolverResult(Status.TIMEOUT)
    if head != "sat":
        raise ProtocolError(f"unexpected solver response {text.strip()[:200]!r}")
    if len(items) < 2 or not isinstance(items[1], list):
        if errors:
            raise ProtocolError(f"solver error: {errors[0]}")
        raise ProtocolError("missing get-value response")
    raw = {}
    for pair in items[1]:
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
            raise ProtocolError(f"malformed get-value entry {pair!r}")
        raw[_unquote(pair[0])] = value_of(pair[1])
    zero = raw.get(ZERO_SYMBOL, Fraction(0))
    model = {}
    for v in names:
        key = _unquote(symbol(v))
        if key not in raw:
            raise ProtocolError(f"no value reported for {v}")
        model[v] = raw[key] - zero
    return SolverResult(Status.SAT, model)


def find_solver(candidates=("z3 -in", "cvc5 --lang smt2 --produce-models", "yices-smt2")):
    """First available external solver command, or None."""
    for cmd in candidates:
        if shutil.which(shlex.split(cmd)[0]):
            return cmd
    return None


def external_solve(command: str, f: RdlFormula, timeout: float | None = 60.0) -> SolverResult:
    argv = shlex.split(command)
    script = emit_smtlib2(f)
    try:
        proc = subprocess.run(argv, input=script, capture_output=True, text=True, timeout=timeout)
    except FileNotFoundError as exc:
        raise SolverCrashed(f"cannot run {argv[0]!r}: {exc}") from None
    except subprocess.TimeoutExpired:
        raise SolverTimeout(f"{argv[0]} exceeded {timeout} s") from None
    if not proc.stdout.strip():
        raise SolverCrashed(
            f"{argv[0]} exited with status {proc.returncode} and no output: {proc.stderr.strip()[:200]}"
        )
    return parse_response(proc.stdout, variables(f))
