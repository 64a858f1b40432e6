"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its timing."""

import random
import shutil
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import bundled
from generators import falsify, random_rdl, replay_violation
from mplcheck.bench import random_formula, random_irreducible
from mplcheck.graph import eigenspace, max_cycle_mean
from mplcheck.maxplus import EPS, identity, mat_mul, parse_matrix, scalar_mat_mul, vector
from mplcheck.orbit import detect_lasso, local_transient, simulate, trans_cone
from mplcheck.smt import check_sat, evaluate
from mplcheck.smt.smtlib import external_solve
from mplcheck.sts import (
    encode_sts_basic,
    encode_sts_looping,
    encode_tcc,
    encode_tdltl,
    eval_expr,
    parse_smv,
    replay_states,
    tcc_property,
    to_smv,
)
from mplcheck.tdltl import TRUE, atom, get_initial, parse_initial, parse_tdltl
from mplcheck.verification import INCREMENTAL, INITIALISED, UNROLLED, UPFRONT, VALID, mc, trans_smt

E = EPS


@contextmanager
def criterion(capsys, number, title, limit):
    """Run the body, print a one-line verdict and enforce the time limit."""
    start = time.perf_counter()
    note = {}
    try:
        yield note
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        kind = "SKIP" if isinstance(exc, pytest.skip.Exception) else "FAIL"
        with capsys.disabled():
            print(f"\n[criterion {number}] {kind} {title} ({elapsed:.2f} s) {exc}".rstrip())
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    extra = f" {note['msg']}" if "msg" in note else ""
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f} s, limit {limit} s){extra}")
    assert ok, f"criterion {number} took {elapsed:.2f} s, limit {limit} s"


def test_criterion_1_example_golden(capsys):
    with criterion(capsys, 1, "example-1 golden suite", 1):
        A = parse_matrix(bundled("example1.mat"))
        lam, gens = eigenspace(A)
        assert lam == max_cycle_mean(A) == 4
        assert gens
        for v in gens:
            x1, x2 = v.to_list()
            assert x1 - x2 == 1
            assert mat_mul(A, v) == scalar_mat_mul(lam, v)
        x0 = vector([0, 0])
        orbit = simulate(A, x0, 3)
        assert [s.to_list() for s in orbit.states] == [[0, 0], [5, 3], [8, 8], [13, 11]]
        w = detect_lasso(orbit)
        assert (w.k, w.l, w.alpha) == (1, 0, 8)
        tr = local_transient(A, x0, 100)
        assert tr.pair == (0, 2)
        assert get_initial(A, atom(1, 1, "<=", 5, k=1)) == atom(1, 2, ">=", 0)


UNDERGROUND_X = [
    [0, E, E, 0, E, E],
    [180, 360, E, 180, 300, E],
    [360, 540, 600, 360, 480, 600],
    [900, 720, 780, 900, 660, 780],
    [1080, 1260, 960, 1080, 1200, 960],
    [1260, 1440, 1500, 1260, 1380, 1500],
    [1800, 1620, 1680, 1800, 1560, 1680],
    [1980, 2160, 1860, 1980, 2100, 1860],
]

# departure times as printed; t_4(6) = 1980 disagrees with x_4(6) = 1800 above
LISTED_T = [
    [0, 360, 600, 0, 300, 600],
    [180, 540, 780, 180, 480, 780],
    [360, 720, 960, 360, 660, 960],
    [900, 1260, 1500, 900, 1200, 1500],
    [1080, 1440, 1680, 1080, 1380, 1680],
    [1260, 1620, 1860, 1260, 1560, 1860],
    [1800, 2160, 2400, 1980, 2100, 2400],
    [1980, 2340, 2580, 1980, 2280, 2580],
]
DISTANCE = [0, 1, 2, 0, 1, 2]
TYPO = (6, 3)


def test_criterion_2_underground(capsys):
    with criterion(capsys, 2, "toy underground network", 5) as note:
        A = parse_matrix(bundled("underground.mat"))
        x0 = vector(UNDERGROUND_X[0])
        orbit = simulate(A, x0, 9)
        assert [orbit[t].to_list() for t in range(8)] == UNDERGROUND_X
        assert local_transient(A, x0, 100).pair == (2, 3)
        assert max_cycle_mean(A) == 300
        t = [[orbit.value(k + DISTANCE[i], i) for i in range(6)] for k in range(8)]
        mismatches = [(k, i) for k in range(8) for i in range(6) if t[k][i] != LISTED_T[k][i]]
        assert mismatches == [TYPO]
        k, i = TYPO
        assert t[k][i] == UNDERGROUND_X[k][i] == 1800
        note["msg"] = "(47/48 listed t-entries exact; t_4(6) printed 1980, derived 1800)"


def test_criterion_3_cone_vs_smt(capsys):
    with criterion(capsys, 3, "trans_cone == trans_smt on 200 random matrices", 120):
        rng = random.Random(2023)
        for idx in range(200):
            n = (4, 6, 8)[idx % 3]
            A = random_irreducible(rng, n, n // 2)
            cone = trans_cone(A, identity(n), 500)
            smt = trans_smt(A, TRUE, 500)
            assert cone == smt, f"instance {idx}: {cone} vs {smt}"


def random_pair(rng):
    n = rng.randint(2, 8)
    A = random_irreducible(rng, n, rng.randint(max(2, n // 2), n))
    return A, random_formula(rng, n, rng.randint(1, 6))


VARIANTS = [(s, t) for s in (UNROLLED, INITIALISED) for t in (INCREMENTAL, UPFRONT)]


def test_criterion_4_variant_agreement(capsys):
    with criterion(capsys, 4, "four mc variants agree, witnesses replay, Valid survives sampling", 300) as note:
        rng = random.Random(77)
        tally = {}
        for idx in range(200):
            A, phi = random_pair(rng)
            verdicts = {v: mc(A, TRUE, phi, 500, *v) for v in VARIANTS}
            kinds = {v.kind for v in verdicts.values()}
            assert len(kinds) == 1, f"pair {idx}: {kinds}"
            kind = kinds.pop()
            tally[kind] = tally.get(kind, 0) + 1
            for v in verdicts.values():
                if v.is_invalid:
                    assert replay_violation(A, phi, v), f"pair {idx}: witness does not replay"
            if kind == VALID:
                assert falsify(A, TRUE, phi, 100, seed=idx) is None, f"pair {idx}: sampled counterexample"
        note["msg"] = f"({', '.join(f'{k}={n}' for k, n in sorted(tally.items()))})"


def test_criterion_5_completeness_threshold(capsys):
    with criterion(capsys, 5, "final k <= l + c - 1 on Valid incremental runs", 60) as note:
        rng = random.Random(5)
        cases = [(parse_matrix(bundled("example1.mat")), parse_initial(bundled("example1_sync.init"), 2),
                  parse_tdltl(bundled("example1_order.tdltl"), 2))]
        for _ in range(150):
            A, phi = random_pair(rng)
            cases.append((A, TRUE, phi))
        checked = 0
        for A, X, phi in cases:
            v = mc(A, X, phi, 500, UNROLLED, INCREMENTAL)
            if not v.is_valid:
                continue
            tr = trans_smt(A, X, 500)
            assert v.k <= tr.l + tr.c - 1, f"k={v.k} exceeds {tr.l} + {tr.c} - 1"
            checked += 1
        assert checked >= 20
        note["msg"] = f"({checked} Valid runs)"


Z3 = "z3 -in" if shutil.which("z3") else None


def test_criterion_6_smt_differential(capsys):
    with criterion(capsys, 6, "1000 random QF-RDL formulas", 120) as note:
        rng = random.Random(6)
        sat = agree = 0
        for idx in range(1000):
            f = random_rdl(rng)
            res = check_sat(f)
            if res.is_sat:
                sat += 1
                assert evaluate(f, res.model), f"formula {idx}: model does not satisfy it"
            if Z3:
                assert external_solve(Z3, f).status == res.status, f"formula {idx}: verdicts differ"
                agree += 1
        note["msg"] = f"({sat} sat; " + (f"{agree}/1000 agree with z3)" if Z3 else "no external solver, differential skipped)")


FIXTURES = [
    ("example1.mat", 2, ["top.init", "example1_sync.init"], ["example1_order.tdltl"], 4),
    ("underground.mat", 6, ["top.init", "underground.init"],
     ["underground_phi1.tdltl", "underground_phi2.tdltl", "underground_phi3.tdltl"], 300),
]


def test_criterion_7_smv_lint(capsys):
    with criterion(capsys, 7, "SMV encodings lint, monitor replay on 20 pinned states", 30) as note:
        linted = 0
        for mat, n, inits, specs, lam in FIXTURES:
            A = parse_matrix(bundled(mat))
            for init in inits:
                X = parse_initial(bundled(init), n)
                models = [encode_sts_basic(A, X), encode_sts_looping(A, X), encode_sts_looping(A, X, lam),
                          encode_tcc(A, X, lam).with_specs(tcc_property(2, 3, n))]
                models += [encode_tdltl(A, X, parse_tdltl(bundled(s), n), lam) for s in specs]
                for model in models:
                    parse_smv(to_smv(model))
                    linted += 1
        A = parse_matrix(bundled("underground.mat"))
        phi = parse_tdltl(bundled("underground_phi3.tdltl"), 6)
        rng = random.Random(7)
        for trial in range(20):
            x0 = [Fraction(rng.randint(0, 600), rng.randint(1, 3)) for _ in range(6)]
            pin = parse_initial(" & ".join(f"x{i + 1} = {v.numerator}/{v.denominator}" for i, v in enumerate(x0)), 6)
            lam = Fraction(300) if trial % 2 else Fraction(0)
            model = encode_tdltl(A, pin, phi, lam)
            mod = parse_smv(to_smv(model))
            states = replay_states(model, A, vector(x0), 6, lam)
            orbit = simulate(A, vector(x0), 12)
            assert all(eval_expr(e, states[0]) for e in mod.init)
            for t, s in enumerate(states):
                assert [s[f"x{i}"] + t * lam for i in range(1, 7)] == orbit[t].to_list()
                for i, d in model.monitors:
                    for j in range(1, d + 1):
                        assert s[f"m{i}_{j}"] + t * lam == orbit.value(t + j, i - 1)
            for cur, nxt in zip(states, states[1:]):
                assert all(eval_expr(e, cur, nxt) for e in mod.trans)
                for v in nxt:
                    if v.startswith("x"):
                        bad = dict(nxt, **{v: nxt[v] + Fraction(1, 7)})
                        assert not all(eval_expr(e, cur, bad) for e in mod.trans)
        note["msg"] = f"({linted} models linted)"


def test_criterion_8_full_table(capsys):
    with capsys.disabled():
        print("\n[criterion 8] N/A full London Underground table: source matrices are unpublished;"
              " the toy network and sampling oracles stand in (criteria 2, 4, 7)")
