"""Exact transient analysis and time-difference model checking for max-plus linear systems."""

from .graph import cycle_time_vector, is_irreducible, max_cycle_mean, precedence_graph
from .maxplus import EPS, MaxPlusMatrix, identity, matrix, parse_matrix, vector
from .orbit import LassoWitness, TransientResult, detect_lasso, local_transient, simulate, trans_cone
from .tdltl import parse_initial, parse_tdltl
from .verification import Verdict, check_all_variants, mc, trans_smt

__version__ = "0.1.0"

__all__ = [
    "EPS", "MaxPlusMatrix", "identity", "matrix", "parse_matrix", "vector",
    "cycle_time_vector", "is_irreducible", "max_cycle_mean", "precedence_graph",
    "LassoWitness", "TransientResult", "detect_lasso", "local_transient", "simulate", "trans_cone",
    "parse_initial", "parse_tdltl", "Verdict", "check_all_variants", "mc", "trans_smt",
]
