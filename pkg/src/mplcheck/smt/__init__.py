"""Quantifier-free rational difference logic: formulas, an embedded solver and an SMT-LIB2 bridge."""

from .formula import (
    FALSE,
    TRUE,
    ZERO,
    RAnd,
    RAtom,
    RdlFormula,
    RFalse,
    RNot,
    ROr,
    RTrue,
    bound,
    diff,
    evaluate,
    r_and,
    r_not,
    r_or,
    variables,
)
from .solver import DifferenceSolver, SolverResult, SolverStats, Status, check_sat

__all__ = [
    "FALSE", "TRUE", "ZERO", "RAnd", "RAtom", "RdlFormula", "RFalse", "RNot", "ROr", "RTrue",
    "bound", "diff", "evaluate", "r_and", "r_not", "r_or", "variables",
    "DifferenceSolver", "SolverResult", "SolverStats", "Status", "check_sat",
]
