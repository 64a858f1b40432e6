"""Symbolic transition system encodings in the SMV language and model-checker drivers."""

from .checker import (
    CheckResult,
    ExternalChecker,
    SamplingChecker,
    check_path,
    mc_tcc_loop,
    parse_checker_output,
    replay_states,
)
from .encode import (
    BASIC,
    LOOPING,
    MONITORS,
    TCC,
    StsModel,
    encode_monitors,
    encode_sts_basic,
    encode_sts_looping,
    encode_tcc,
    encode_tdltl,
    formula_text,
    monitor_depths,
    smv_number,
    tcc_property,
    tdltl_to_ltl_monitors,
    to_smv,
)
from .smv import SmvModule, eval_expr, eval_ltl, parse_smv

__all__ = [
    "CheckResult", "ExternalChecker", "SamplingChecker", "check_path", "mc_tcc_loop",
    "parse_checker_output", "replay_states", "BASIC", "LOOPING", "MONITORS", "TCC", "StsModel",
    "encode_monitors", "encode_sts_basic", "encode_sts_looping", "encode_tcc", "encode_tdltl",
    "formula_text", "monitor_depths", "smv_number", "tcc_property", "tdltl_to_ltl_monitors",
    "to_smv", "SmvModule", "eval_expr", "eval_ltl", "parse_smv",
]
