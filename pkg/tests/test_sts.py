import random
from fractions import Fraction

import pytest

from conftest import bundled
from mplcheck.errors import CheckerUnavailable, NotRegular, SmvSyntaxError, TraceParseError
from mplcheck.maxplus import EPS, MaxPlusMatrix, parse_matrix, vector
from mplcheck.orbit import TransientResult, local_transient, simulate, step
from mplcheck.sts import (
    ExternalChecker,
    SamplingChecker,
    check_path,
    encode_monitors,
    encode_sts_basic,
    encode_sts_looping,
    encode_tcc,
    encode_tdltl,
    eval_expr,
    eval_ltl,
    mc_tcc_loop,
    parse_checker_output,
    parse_smv,
    replay_states,
    smv_number,
    tcc_property,
    tdltl_to_ltl_monitors,
    to_smv,
)
from mplcheck.sts.checker import CheckResult
from mplcheck.tdltl import TRUE, atom, parse_initial, parse_tdltl
from mplcheck.verification import trans_smt

SYNC = parse_initial("x1 - x2 = 0")


def lint(model):
    return parse_smv(to_smv(model), "model.smv")


def conjuncts(e):
    return conjuncts(e[1]) + conjuncts(e[2]) if e[0] == "&" else [e]


# basic and looping encodings


def test_basic_structure(A1):
    mod = lint(encode_sts_basic(A1, TRUE))
    assert mod.variables == {"x1": "real", "x2": "real"}
    parts = conjuncts(mod.trans[0])
    assert sum(1 for c in parts if c[0] == ">=") == 4
    assert sum(1 for c in parts if c[0] == "|") == 2


def test_basic_single_entry_rows():
    mod = lint(encode_sts_basic(MaxPlusMatrix([[Fraction(7, 2)]]), TRUE))
    assert conjuncts(mod.trans[0]) == [("=", ("next", "x1"), ("+", ("var", "x1"), ("num", Fraction(7, 2))))]
    with pytest.raises(NotRegular):
        encode_sts_basic(MaxPlusMatrix([[EPS, EPS], [1, 1]]), TRUE)


def test_basic_underground(underground):
    mod = lint(encode_sts_basic(underground, parse_initial(bundled("underground.init"), 6)))
    assert len(mod.variables) == 6
    parts = conjuncts(mod.trans[0])
    # a >= conjunct per finite entry of rows with two of them, one equation per row
    assert sum(1 for c in parts if c[0] == ">=") == 12
    assert len(parts) == 18


def test_rational_constants():
    assert smv_number(Fraction(-7, 5)) == "-f'7/5"
    assert smv_number(3) == "3"
    mod = lint(encode_sts_basic(MaxPlusMatrix([[Fraction(1, 3), 2], [0, EPS]]), parse_initial("x1 - x2 >= -1/2")))
    assert eval_expr(mod.init[0], {"x1": 0, "x2": Fraction(1, 2)})


def _random_states(rng, names, count):
    return [{v: Fraction(rng.randint(-20, 20), rng.randint(1, 2)) for v in names} for _ in range(count)]


def test_looping_with_zero_matches_basic(A1, underground):
    rng = random.Random(0)
    for M in (A1, underground):
        basic = lint(encode_sts_basic(M, TRUE))
        looping = lint(encode_sts_looping(M, TRUE, 0))
        names = [f"x{i}" for i in range(1, M.rows + 1)]
        # the looping relation minus its lam' = lam conjunct, at lam = 0
        dyn = conjuncts(looping.trans[0])[:-1]
        pairs = []
        for s in _random_states(rng, names, 40):
            succ = dict(zip(names, step(M, [s[v] for v in names])))
            pairs += [(s, succ), (s, {v: x + rng.choice((0, 1)) for v, x in succ.items()})]
        for s, t in pairs:
            s0, t0 = dict(s, lam=0), dict(t, lam=0)
            assert eval_expr(basic.trans[0], s, t) == all(eval_expr(c, s0, t0) for c in dyn)


def test_looping_fixpoint(A1):
    model = encode_sts_looping(A1, TRUE, 4)
    mod = lint(model)
    assert len(mod.variables) == 3
    s = {"x1": Fraction(1), "x2": Fraction(0), "lam": Fraction(4)}
    assert check_path(mod, [s], 0)


def test_looping_paths_deshift_to_orbits(underground):
    rng = random.Random(5)
    lam = Fraction(300)
    mod = lint(encode_sts_looping(underground, TRUE))
    for _ in range(10):
        x = [Fraction(rng.randint(0, 300)) for _ in range(6)]
        path = [x]
        for _ in range(6):
            path.append([v - lam for v in step(underground, path[-1])])
        states = [dict({f"x{i + 1}": v for i, v in enumerate(p)}, lam=lam) for p in path]
        for a, b in zip(states, states[1:]):
            assert eval_expr(mod.trans[0], a, b)
        orbit = simulate(underground, vector(x), 6)
        for t, p in enumerate(path):
            assert [v + t * lam for v in p] == orbit[t].to_list()


# TCC encoding


def test_tcc_structure(A1):
    model = encode_tcc(A1, SYNC).with_specs(tcc_property(0, 2, 2))
    mod = lint(model)
    assert set(mod.variables) == {"x1", "x2", "lam", "h1", "h2", "f"}
    assert mod.variables["f"] == "boolean"
    spec = mod.specs[0]
    assert spec[0] == "->"  # no outer X for k0 = 0
    inner = spec[2]
    depth = 0
    while inner[0] == "X":
        depth, inner = depth + 1, inner[1]
    assert depth == 2 and inner[0] == "="
    assert tcc_property(3, 1, 2).startswith("X X X ")
    with pytest.raises(ValueError):
        tcc_property(0, 0, 2)


def test_tcc_property_holds_for_sync_class(A1):
    checker = SamplingChecker(A1, SYNC, samples=40)
    assert checker.check(encode_tcc(A1, SYNC).with_specs(tcc_property(0, 2, 2))).valid
    assert not checker.check(encode_tcc(A1, SYNC).with_specs(tcc_property(0, 1, 2))).valid
    for x in checker.candidates:
        assert local_transient(A1, vector(x), 100).pair == (0, 2)


# monitors


def test_monitor_encoding(A1):
    assert encode_monitors(A1, TRUE, set()).variables == encode_sts_looping(A1, TRUE).variables
    model = encode_monitors(A1, TRUE, {(1, 2)})
    mod = lint(model)
    assert [v for v in mod.variables if v.startswith("m")] == ["m1_1", "m1_2"]
    with pytest.raises(ValueError):
        encode_monitors(A1, TRUE, {(1, 0)})


def test_tdltl_to_monitors():
    M, text = tdltl_to_ltl_monitors(parse_tdltl("G(x1 - x2 > 0)"))
    assert M == frozenset() and text == "G (x1 - x2 > 0)"
    M, text = tdltl_to_ltl_monitors(atom(1, 1, "<=", 5, k=1))
    assert M == {(1, 1)} and text == "x1 - m1_1 >= -5"
    M, _ = tdltl_to_ltl_monitors(parse_tdltl(bundled("underground_phi3.tdltl"), 6))
    assert max(k for _, k in M) == 3


def test_monitor_replay_bisimulation(underground):
    """Pinned initial states: the encoding's step relation is functional and its
    monitors carry the simulated future values."""
    rng = random.Random(11)
    phi = parse_tdltl(bundled("underground_phi3.tdltl"), 6)
    for trial in range(20):
        x0 = [Fraction(rng.randint(0, 300), rng.randint(1, 2)) for _ in range(6)]
        pin = parse_initial(" & ".join(f"x{i + 1} = {v.numerator}/{v.denominator}" for i, v in enumerate(x0)), 6)
        lam = Fraction(300) if trial % 2 else Fraction(0)
        model = encode_tdltl(underground, pin, phi, lam)
        mod = lint(model)
        states = replay_states(model, underground, vector(x0), 6, lam)
        orbit = simulate(underground, vector(x0), 12)
        for t, s in enumerate(states):
            assert [s[f"x{i}"] + t * lam for i in range(1, 7)] == orbit[t].to_list()
            for i, d in model.monitors:
                for j in range(1, d + 1):
                    assert s[f"m{i}_{j}"] + t * lam == orbit.value(t + j, i - 1)
        assert all(eval_expr(e, states[0]) for e in mod.init)
        for t in range(len(states) - 1):
            cur, nxt = states[t], states[t + 1]
            assert all(eval_expr(e, cur, nxt) for e in mod.trans)
            # the step pins every successor x and every current monitor
            for v in nxt:
                if v.startswith("x"):
                    bad = dict(nxt, **{v: nxt[v] + Fraction(1, 7)})
                    assert not all(eval_expr(e, cur, bad) for e in mod.trans)
                elif v.startswith("m"):
                    bad = dict(cur, **{v: cur[v] + Fraction(1, 7)})
                    assert not all(eval_expr(e, bad, nxt) for e in mod.trans)


def test_monitor_spec_agrees_with_tdltl(A1):
    phi = atom(1, 1, "<=", 5, k=1)
    model = encode_tdltl(A1, TRUE, phi, 4)
    mod = lint(model)
    for x in ([0, 0], [1, 0], [0, 3]):
        states = replay_states(model, A1, vector(x), 2, 4)
        expected = simulate(A1, vector(x), 1)
        truth = expected.value(1, 0) - expected.value(0, 0) <= 5
        assert eval_ltl(mod.specs[0], states, 1) == truth


# SMV grammar


@pytest.mark.parametrize(
    "text",
    [
        "MODULE main\nVAR\n  x : real;\nINIT\n  y = 0;\n",
        "MODULE main\nVAR\n  x : real;\nINIT\n  next(x) = 0;\n",
        "MODULE main\nVAR\n  x : real;\nTRANS\n  G (x = 0);\n",
        "MODULE main\nVAR\n  x : integer;\n",
        "MODULE main\nVAR\n  x : real;\nINIT\n  x = @;\n",
    ],
)
def test_lint_rejects(text):
    with pytest.raises(SmvSyntaxError):
        parse_smv(text)


def test_eval_ltl_lasso():
    s = lambda v: {"x": Fraction(v)}
    mod = parse_smv("MODULE main\nVAR\n  x : real;\nLTLSPEC\n  G F (x = 1);\nLTLSPEC\n  F G (x = 1);\n")
    states = [s(0), s(1), s(0)]
    assert eval_ltl(mod.specs[0], states, 1) is True
    assert eval_ltl(mod.specs[1], states, 1) is False


# checker drivers


NUSMV_FALSE = """*** This is NuSMV 2.6.0
-- specification X ((!f & X f) -> X (x1 - h1 = x2 - h2))  is false
-- as demonstrated by the following execution sequence
Trace Description: LTL Counterexample
Trace Type: Counterexample
  -> State: 1.1 <-
    x1 = 3/2
    x2 = -4
    lam = 4
    f = FALSE
  -> State: 1.2 <-
    x1 = 7
"""


def test_parse_checker_output():
    r = parse_checker_output(NUSMV_FALSE)
    assert not r.valid and r.initial == {"x1": Fraction(3, 2), "x2": Fraction(-4), "lam": 4, "f": False}
    assert parse_checker_output("-- specification G (x1 >= 0)  is true\n").valid
    with pytest.raises(TraceParseError):
        parse_checker_output("nothing useful\n")
    with pytest.raises(TraceParseError):
        parse_checker_output("-- specification G (x1 >= 0)  is false\n")


def test_external_checker_missing():
    with pytest.raises(CheckerUnavailable):
        ExternalChecker("definitely-not-a-model-checker")
    with pytest.raises(CheckerUnavailable):
        mc_tcc_loop(MaxPlusMatrix([[1]]), TRUE, "definitely-not-a-model-checker")


class ScriptedChecker:
    """Refutes guesses with precomputed counterexamples, then accepts."""

    def __init__(self, starts):
        self.starts = list(starts)
        self.seen = []

    def check(self, model):
        self.seen.append(model.ltl_specs[0])
        if not self.starts:
            return CheckResult(True)
        x = self.starts.pop(0)
        return CheckResult(False, {f"x{i + 1}": v for i, v in enumerate(x)})


def test_tcc_loop_refinement_updates(A1):
    starts = [[0, 0], [0, 5]]
    a, b = (local_transient(A1, vector(x), 100) for x in starts)
    checker = ScriptedChecker(starts)
    tr = mc_tcc_loop(A1, TRUE, checker)
    assert tr == TransientResult.found(max(a.l, b.l), 2) == TransientResult.found(1, 2)
    assert checker.seen[0] == tcc_property(0, 1, 2)
    assert checker.seen[1] == tcc_property(0, 2, 2)


def test_tcc_loop_with_sampling_checker(A1, underground):
    assert mc_tcc_loop(A1, SYNC, SamplingChecker(A1, SYNC)) == TransientResult.found(0, 2)
    iota = parse_initial(bundled("underground.init"), 6)
    found = mc_tcc_loop(underground, iota, SamplingChecker(underground, iota))
    exact = trans_smt(underground, iota, 1000)
    # sampling can only refute, so the loop may stop below the exact pair
    assert found.is_found and found.l <= exact.l and exact.c % found.c == 0


def test_tcc_loop_trace_without_state_values(A1):
    class Broken:
        def check(self, model):
            return CheckResult(False, {"x1": Fraction(0)})

    with pytest.raises(TraceParseError):
        mc_tcc_loop(A1, TRUE, Broken())
