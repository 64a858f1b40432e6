"""Model-checker drivers for the SMV encodings and the MC-TCC refinement loop."""

from __future__ import annotations

import os
import random
import re
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from ..errors import CheckerUnavailable, TraceParseError
from ..graph import cycle_time_vector
from ..maxplus import MaxPlusMatrix, vector
from ..orbit import TransientResult, local_transient, simulate
from ..tdltl.ast import Formula
from ..verification.sampling import sample_initial
from .encode import BASIC, LAMBDA, MONITORS, TCC, StsModel, encode_tcc, h_name, m_name, tcc_property, to_smv, x_name
from .smv import eval_expr, eval_ltl, next_depth, parse_number, parse_smv


@dataclass
class CheckResult:
    valid: bool
    initial: dict | None = None  # first state of the counterexample
    trace: list | None = None
    loop: int | None = None


# replaying concrete paths of an encoding


def _lam_of(model: StsModel, lam) -> Fraction:
    if model.kind == BASIC:
        return Fraction(0)
    return Fraction(model.lam if model.lam is not None else lam or 0)


def shifted_rows(A: MaxPlusMatrix, x0, count: int, lam) -> list:
    """x(t) - t*lam for t < count."""
    orbit = simulate(A, x0, count)
    return [[v - t * lam for v in orbit[t].to_list()] for t in range(count)]


def states_from_rows(model: StsModel, rows: list, length: int, lam, switch=None) -> list:
    n = model.n
    xs = [x_name(i) for i in range(1, n + 1)]
    hs = [h_name(i) for i in range(1, n + 1)]
    states = []
    for t in range(length):
        s = dict(zip(xs, rows[t]))
        if model.kind != BASIC:
            s[LAMBDA] = lam
        if model.kind == TCC:
            frozen = t if switch is None else min(t, switch)
            s.update(zip(hs, rows[frozen]))
            s["f"] = switch is not None and t > switch
        if model.kind == MONITORS:
            for i, d in model.monitors:
                for j in range(1, d + 1):
                    s[m_name(i, j)] = rows[t + j][i - 1] + j * lam
        states.append(s)
    return states


def replay_states(model: StsModel, A: MaxPlusMatrix, x0, length: int, lam=None, switch=None):
    """The path of model from x0, states 0..length-1, as name -> value dicts.

    Looping encodings store x(t) - t*lam. In the TCC encoding f is raised right
    after step `switch` (never when None), freezing h at the state of that step.
    """
    lam = _lam_of(model, lam)
    depth = max((d for _, d in model.monitors), default=0)
    return states_from_rows(model, shifted_rows(A, x0, length + depth, lam), length, lam, switch)


def check_path(module, states, loop):
    """Whether the lasso is a path of the module (INIT at 0, TRANS on every step)."""
    if not all(eval_expr(e, states[0]) for e in module.init):
        return False
    succ = list(range(1, len(states))) + [loop]
    for t, s in enumerate(states):
        nxt = states[succ[t]]
        if not all(eval_expr(e, s, nxt) for e in module.trans):
            return False
    return True


class SamplingChecker:
    """Stand-in for an LTL model checker: draws initial states from iota, replays
    the encoding's unique paths from them as lassos and evaluates every LTLSPEC.

    It can only refute. A "valid" answer means no sampled path violated the
    specifications.
    """

    SPREADS = (30, 300, 1000, 3000)
    SELF_CHECKS = 5  # replayed paths also checked against INIT and TRANS

    def __init__(self, A: MaxPlusMatrix, iota: Formula, samples: int = 200, seed: int = 0, N: int = 1000):
        self.A = A
        self.iota = iota
        self.N = N
        chi = cycle_time_vector(A)
        self.lam = chi[0] if all(v == chi[0] for v in chi) else None
        rng = random.Random(seed)
        per = -(-samples // len(self.SPREADS))
        self.candidates = [x for sp in self.SPREADS for x in sample_initial(iota, A.rows, per, rng, sp)]
        self._pairs = {}
        self._rows = {}

    def _rows_for(self, idx, x0, count, lam):
        rows = self._rows.get((idx, lam))
        if rows is None or len(rows) < count:
            rows = shifted_rows(self.A, x0, max(count, 2 * len(rows or ())), lam)
            self._rows[(idx, lam)] = rows
        return rows

    def _lassos(self, model, module, idx, x0):
        pair = self._pairs.get(idx)
        if pair is None:
            pair = self._pairs[idx] = local_transient(self.A, x0, self.N)
        depths = [next_depth(e) for e in module.specs]
        bounded = all(d is not None for d in depths)
        horizon = max(depths, default=0) + 1 if bounded else 0
        lam = model.lam if model.lam is not None else self.lam
        periodic = pair.is_found and lam is not None and (model.kind != BASIC or lam == 0)
        if not periodic and not bounded:
            raise CheckerUnavailable("sampling checker needs periodic orbits for unbounded properties")
        switches = [None]
        if model.kind == TCC:
            # raising f after the last visible position looks like never raising it
            last = horizon if bounded else pair.l + pair.c
            switches += list(range(last))
        lam = _lam_of(model, lam)
        depth = max((d for _, d in model.monitors), default=0)
        for sw in switches:
            if periodic:
                start = pair.l if sw is None else max(pair.l, sw + 1)
                length, loop = start + pair.c, start
            else:
                # a prefix covers every position a bounded property can see
                length = horizon + (0 if sw is None else sw + 1) + 1
                loop = length - 1
            rows = self._rows_for(idx, x0, length + depth, lam)
            yield states_from_rows(model, rows, length, lam, sw), loop, periodic

    def check(self, model: StsModel) -> CheckResult:
        module = parse_smv(to_smv(model))
        for idx, x in enumerate(self.candidates):
            x0 = vector(x)
            for states, loop, periodic in self._lassos(model, module, idx, x0):
                if periodic and idx < self.SELF_CHECKS and not check_path(module, states, loop):
                    raise RuntimeError("replayed orbit is not a path of the encoding")
                for spec in module.specs:
                    if not eval_ltl(spec, states, loop):
                        return CheckResult(False, dict(states[0]), states, loop)
        return CheckResult(True)


# external model checkers

_VERDICT = re.compile(r"^--\s*specification\s+(.*)\s+is\s+(true|false)\s*$")
_STATE = re.compile(r"^\s*->\s*State:\s*\S+\s*<-\s*$")
_ASSIGN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_$#.\[\]]*)\s*=\s*(\S.*?)\s*$")


def parse_checker_output(text: str, source: str | None = None) -> CheckResult:
    """Verdict and first counterexample state from NuSMV-style output."""
    verdicts = []
    lines = text.splitlines()
    state, in_state, trace_started = None, False, False
    for no, line in enumerate(lines, 1):
        m = _VERDICT.match(line.strip())
        if m:
            verdicts.append(m.group(2) == "true")
            continue
        if verdicts and verdicts[-1] is False and state is None and _STATE.match(line):
            state, in_state, trace_started = {}, True, True
            continue
        if in_state:
            if _STATE.match(line) or line.strip().startswith("--") or not line.strip():
                in_state = False
                continue
            a = _ASSIGN.match(line)
            if not a:
                raise TraceParseError(f"cannot read trace line {line.strip()!r}", no, None, source)
            name, raw = a.group(1), a.group(2)
            if raw in ("TRUE", "FALSE"):
                state[name] = raw == "TRUE"
            else:
                try:
                    state[name] = parse_number(raw)
                except ValueError:
                    raise TraceParseError(f"cannot read value {raw!r} of {name}", no, None, source) from None
    if not verdicts:
        raise TraceParseError("no specification verdict in checker output", source=source)
    if all(verdicts):
        return CheckResult(True)
    if not trace_started or not state:
        raise TraceParseError("a specification is false but no counterexample trace follows", source=source)
    return CheckResult(False, state)


class ExternalChecker:
    """Runs `command <file.smv>` and reads its verdict and counterexample."""

    def __init__(self, command: str, timeout: float | None = 600.0):
        self.argv = shlex.split(command)
        if not self.argv or shutil.which(self.argv[0]) is None:
            raise CheckerUnavailable(f"model checker {command!r} not found")
        self.timeout = timeout

    def check(self, model: StsModel) -> CheckResult:
        fd, path = tempfile.mkstemp(suffix=".smv")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(to_smv(model))
            try:
                proc = subprocess.run(self.argv + [path], capture_output=True, text=True, timeout=self.timeout)
            except FileNotFoundError as exc:
                raise CheckerUnavailable(str(exc)) from None
            except subprocess.TimeoutExpired:
                raise CheckerUnavailable(f"{self.argv[0]} exceeded {self.timeout} s") from None
            return parse_checker_output(proc.stdout, self.argv[0])
        finally:
            os.unlink(path)


def mc_tcc_loop(A: MaxPlusMatrix, iota: Formula, checker, N: int = 1000, lam=None) -> TransientResult:
    """Transient and cyclicity of (A, iota) by refining (k0, c) on model-checker counterexamples.

    checker is a command line for an external SMV checker or any object with a
    check(model) method.
    """
    if isinstance(checker, str):
        checker = ExternalChecker(checker)
    model = encode_tcc(A, iota, lam)
    n = A.rows
    k0, c = 0, 1
    while k0 + c <= N:
        res = checker.check(model.with_specs(tcc_property(k0, c, n)))
        if res.valid:
            return TransientResult.found(k0, c)
        try:
            x0 = vector([res.initial[x_name(i)] for i in range(1, n + 1)])
        except KeyError as exc:
            raise TraceParseError(f"counterexample lacks a value for {exc.args[0]}") from None
        sub = local_transient(A, x0, N)
        if not sub.is_found:
            return sub
        nk, nc = max(k0, sub.l), lcm(c, sub.c)
        if (nk, nc) == (k0, c):
            raise RuntimeError("counterexample does not refute the current guess")
        k0, c = nk, nc
    return TransientResult.bound_reached()
