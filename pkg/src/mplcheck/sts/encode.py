"""Symbolic transition system encodings of MPL systems, written in the SMV language."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from ..maxplus import EPS, MaxPlusMatrix, require_regular, require_square
from ..tdltl.ast import (
    And,
    Atom,
    Bottom,
    Finally,
    Formula,
    Globally,
    Next,
    Not,
    Or,
    Release,
    Top,
    Until,
    atoms,
    to_pnf,
)

BASIC = "basic"
LOOPING = "looping"
TCC = "tcc"
MONITORS = "monitors"
LAMBDA = "lam"


@dataclass(frozen=True)
class StsModel:
    """Variables, initial condition, transition relation and LTL properties, as SMV text."""

    variables: tuple  # ((name, sort), ...)
    init: str
    trans: str
    ltl_specs: tuple = ()
    kind: str = BASIC
    n: int = 0
    lam: Fraction | None = None  # value pinned in INIT, if any
    monitors: tuple = ()  # ((i, depth), ...)

    @property
    def names(self):
        return [v for v, _ in self.variables]

    def with_specs(self, *specs: str) -> "StsModel":
        return replace(self, ltl_specs=tuple(specs))


def x_name(i: int) -> str:
    return f"x{i}"


def h_name(i: int) -> str:
    return f"h{i}"


def m_name(i: int, j: int) -> str:
    return f"m{i}_{j}"


def smv_number(c) -> str:
    """Exact constant: integers plainly, other rationals as f'p/q literals."""
    c = Fraction(c)
    mag = abs(c)
    body = str(mag.numerator) if mag.denominator == 1 else f"f'{mag.numerator}/{mag.denominator}"
    return f"-{body}" if c < 0 else body


def _plus(term: str, c) -> str:
    c = Fraction(c)
    if c == 0:
        return term
    return f"{term} + {smv_number(c)}" if c > 0 else f"{term} - {smv_number(-c)}"


def _conj(parts, sep=" & ") -> str:
    parts = [p for p in parts if p != "TRUE"]
    if not parts:
        return "TRUE"
    if len(parts) == 1:
        return parts[0]
    return sep.join(f"({p})" if _needs_parens(p) else p for p in parts)


_LINES = " &\n  "


def _disj(parts) -> str:
    parts = list(parts)
    if not parts:
        return "FALSE"
    if len(parts) == 1:
        return parts[0]
    return "(" + " | ".join(parts) + ")"


def _needs_parens(p: str) -> bool:
    depth = 0
    for i, ch in enumerate(p):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and (ch == "|" or p.startswith("->", i) or p.startswith("<->", i)):
            return True
    return False


def _term(i: int, offset: int, monitored: bool) -> str:
    if i == 0:
        return None
    if offset == 0:
        return x_name(i)
    if not monitored:
        raise ValueError("cross-time atom in a context without monitors")
    return m_name(i, offset)


def atom_text(a: Atom, monitored: bool = False) -> str:
    """x_i^(k) - x_j^(l) rel alpha over state variables (and monitors)."""
    rel = ">" if a.strict else ">="
    left, right = _term(a.i, a.k, monitored), _term(a.j, a.l, monitored)
    alpha = a.alpha
    if right is None and left is None:
        return "TRUE" if (0 > alpha if a.strict else 0 >= alpha) else "FALSE"
    if right is None:
        return f"{left} {rel} {smv_number(alpha)}"
    if left is None:
        flipped = "<" if a.strict else "<="
        return f"{right} {flipped} {smv_number(-alpha)}"
    return f"{left} - {right} {rel} {smv_number(alpha)}"


def formula_text(f: Formula, monitored: bool = False) -> str:
    """SMV rendering of a TD or TDLTL formula (U/R become U/V)."""
    if isinstance(f, Top):
        return "TRUE"
    if isinstance(f, Bottom):
        return "FALSE"
    if isinstance(f, Atom):
        return atom_text(f, monitored)
    if isinstance(f, Not):
        return f"!({formula_text(f.arg, monitored)})"
    if isinstance(f, And):
        return "(" + " & ".join(formula_text(a, monitored) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(formula_text(a, monitored) for a in f.args) + ")"
    if isinstance(f, Next):
        return f"X ({formula_text(f.arg, monitored)})"
    if isinstance(f, Finally):
        return f"F ({formula_text(f.arg, monitored)})"
    if isinstance(f, Globally):
        return f"G ({formula_text(f.arg, monitored)})"
    if isinstance(f, Until):
        return f"(({formula_text(f.left, monitored)}) U ({formula_text(f.right, monitored)}))"
    if isinstance(f, Release):
        return f"(({formula_text(f.left, monitored)}) V ({formula_text(f.right, monitored)}))"
    raise TypeError(f"not a formula: {f!r}")


def _dynamics(A: MaxPlusMatrix, shift: str | None):
    require_square(A)
    require_regular(A)
    conjuncts = []
    for i, row in enumerate(A.entries, 1):
        fin = [(j, a) for j, a in enumerate(row, 1) if a is not EPS]
        rhs = [_plus(x_name(j), a) + (f" - {shift}" if shift else "") for j, a in fin]
        lhs = f"next({x_name(i)})"
        if len(fin) > 1:
            conjuncts += [f"{lhs} >= {r}" for r in rhs]
        conjuncts.append(_disj(f"{lhs} = {r}" for r in rhs))
    return conjuncts


def encode_sts_basic(A: MaxPlusMatrix, iota: Formula) -> StsModel:
    """Real variables x1..xn; x' = A x as >= conjuncts plus one = disjunction per row.

    The >= conjuncts of a row with a single finite entry are implied by its
    equality and are left out.
    """
    n = A.rows
    return StsModel(
        variables=tuple((x_name(i), "real") for i in range(1, n + 1)),
        init=formula_text(iota),
        trans=_conj(_dynamics(A, None), _LINES),
        kind=BASIC,
        n=n,
    )


def encode_sts_looping(A: MaxPlusMatrix, iota: Formula, lam=None) -> StsModel:
    """Dynamics shifted down by a frozen real variable lam, so periodic orbits become loops.

    When lam is given its value is fixed by the initial condition.
    """
    n = A.rows
    init = formula_text(iota)
    if lam is not None:
        init = _conj([init, f"{LAMBDA} = {smv_number(lam)}"])
    return StsModel(
        variables=tuple((x_name(i), "real") for i in range(1, n + 1)) + ((LAMBDA, "real"),),
        init=init,
        trans=_conj(_dynamics(A, LAMBDA) + [f"next({LAMBDA}) = {LAMBDA}"], _LINES),
        kind=LOOPING,
        n=n,
        lam=None if lam is None else Fraction(lam),
    )


def encode_tcc(A: MaxPlusMatrix, iota: Formula, lam=None) -> StsModel:
    """Looping encoding plus history variables h_i and a Boolean f.

    h follows x while f is false and is held once f has been raised; f never
    falls again.
    """
    base = encode_sts_looping(A, iota, lam)
    n = base.n
    xs = [x_name(i) for i in range(1, n + 1)]
    hs = [h_name(i) for i in range(1, n + 1)]
    track = _conj([f"{x} = {h}" for x, h in zip(xs, hs)])
    hold = _conj([f"{h} = next({h})" for h in hs])
    return replace(
        base,
        variables=base.variables + tuple((h, "real") for h in hs) + (("f", "boolean"),),
        init=_conj([base.init, "!f", track]),
        trans=_conj([base.trans, "f -> next(f)", f"next(f) -> ({hold})", f"!f -> ({track})"], _LINES),
        kind=TCC,
    )


def tcc_property(k0: int, c: int, n: int) -> str:
    """X^k0 ((!f & X f) -> X^c (x1 - h1 = x2 - h2 & ... )) for n variables."""
    if k0 < 0 or c < 1:
        raise ValueError("need k0 >= 0 and c >= 1")
    eqs = [
        f"{x_name(i)} - {h_name(i)} = {x_name(i + 1)} - {h_name(i + 1)}" for i in range(1, n)
    ]
    body = _conj(eqs)
    inner = "X " * c + f"({body})"
    return "X " * k0 + f"((!f & X f) -> {inner})"


def monitor_depths(M) -> dict:
    """Longest monitored offset per variable."""
    depth = {}
    for i, k in M:
        if k < 1:
            raise ValueError("monitored terms need an offset of at least 1")
        depth[i] = max(depth.get(i, 0), k)
    return dict(sorted(depth.items()))


def encode_monitors(A: MaxPlusMatrix, iota: Formula, M, lam=None) -> StsModel:
    """Looping encoding with monitor chains m_i_1..m_i_k predicting x_i k steps ahead.

    States of the looping encoding are shifted down by lam at every step, so a
    monitor adds lam back once per step of look-ahead; the difference between
    a monitor and any current variable is then the true time difference.
    """
    base = encode_sts_looping(A, iota, lam)
    depth = monitor_depths(M)
    names, trans = [], [base.trans]
    for i, d in depth.items():
        for j in range(1, d + 1):
            names.append(m_name(i, j))
            src = x_name(i) if j == 1 else m_name(i, j - 1)
            trans.append(f"{m_name(i, j)} = next({src}) + {LAMBDA}")
    return replace(
        base,
        variables=base.variables + tuple((m, "real") for m in names),
        trans=_conj(trans, _LINES),
        kind=MONITORS,
        monitors=tuple(depth.items()),
    )


def tdltl_to_ltl_monitors(phi: Formula):
    """Monitored terms of phi and its LTL rendering over monitor variables."""
    M = set()
    for a in atoms(phi):
        if a.i and a.k >= 1:
            M.add((a.i, a.k))
        if a.j and a.l >= 1:
            M.add((a.j, a.l))
    return frozenset(M), formula_text(phi, monitored=True)


def encode_tdltl(A: MaxPlusMatrix, iota: Formula, phi: Formula, lam=None) -> StsModel:
    """Monitor encoding for phi with the rewritten property attached."""
    M, text = tdltl_to_ltl_monitors(to_pnf(phi))
    return encode_monitors(A, iota, M, lam).with_specs(text)


def to_smv(model: StsModel) -> str:
    lines = ["MODULE main", "VAR"]
    lines += [f"  {name} : {sort};" for name, sort in model.variables]
    lines += ["INIT", f"  {model.init};", "TRANS", f"  {model.trans};"]
    for spec in model.ltl_specs:
        lines += ["LTLSPEC", f"  {spec};"]
    return "\n".join(lines) + "\n"
