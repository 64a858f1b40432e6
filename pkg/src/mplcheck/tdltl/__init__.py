"""Time-difference temporal logic: syntax, semantics and initial-state rewriting."""

from .ast import (
    FALSE,
    TRUE,
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
    atom,
    atoms,
    conj,
    disj,
    map_atoms,
    negate,
    size,
    to_pnf,
)
from .parser import bind, parse_initial, parse_tdltl
from .printer import to_text
from .rewrite import InitialRewriter, get_initial, get_initial_tdltl, reduce_max_ineq
from .semantics import eval_bounded, eval_initial, eval_lasso, eval_td, eval_td_atom, holds

negate_to_pnf = negate

__all__ = [
    "FALSE", "TRUE", "And", "Atom", "Bottom", "Finally", "Formula", "Globally", "Next",
    "Not", "Or", "Release", "Top", "Until", "atom", "atoms", "conj", "disj", "map_atoms",
    "negate", "negate_to_pnf", "size", "to_pnf", "bind", "parse_initial", "parse_tdltl",
    "to_text", "InitialRewriter", "get_initial", "get_initial_tdltl", "reduce_max_ineq",
    "eval_bounded", "eval_initial", "eval_lasso", "eval_td", "eval_td_atom", "holds",
]
