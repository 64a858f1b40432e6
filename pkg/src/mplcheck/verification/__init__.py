"""SMT-based analysis of MPL systems: symbolic unrolling, transient computation and TDLTL model checking."""

from .encode import (
    INITIALISED,
    UNROLLED,
    SymbState,
    bmc_body_td,
    build_bmc_formula,
    decode_vector,
    eq_func,
    eq_func_td,
    initial_to_rdl,
    loop_constraint,
    loop_constraint_td,
    orbit_constraints,
    symb_mpl,
    td_to_rdl,
    var_name,
    witness_encoding,
)
from .mc import BOUND_EXCEEDED, INCREMENTAL, INVALID, UPFRONT, VALID, Verdict, check_all_variants, mc
from .sampling import random_rational, sample_initial
from .transient import completeness_threshold, trans_smt

__all__ = [
    "INITIALISED", "UNROLLED", "SymbState", "bmc_body_td", "build_bmc_formula", "decode_vector",
    "eq_func", "eq_func_td", "initial_to_rdl", "loop_constraint", "loop_constraint_td",
    "orbit_constraints", "symb_mpl", "td_to_rdl", "var_name", "witness_encoding",
    "BOUND_EXCEEDED", "INCREMENTAL", "INVALID", "UPFRONT", "VALID", "Verdict",
    "check_all_variants", "mc", "random_rational", "sample_initial",
    "completeness_threshold", "trans_smt",
]
