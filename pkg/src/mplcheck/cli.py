"""Command-line interface: mplcheck <command> ...

Exit codes: 0 valid or found, 1 invalid, 2 bound exceeded or no transient,
10 usage error, 11 unreadable or malformed input, 12 external tool failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from . import __version__
from .bench import generate
from .errors import CheckerUnavailable, InfeasibleParams, MplError, ParseError, SolverError
from .maxplus import format_scalar, identity, parse_matrix
from .orbit import TransientResult, detect_lasso, simulate, trans_cone
from .smt.solver import SolverStats
from .sts import (
    ExternalChecker,
    SamplingChecker,
    encode_monitors,
    encode_sts_basic,
    encode_sts_looping,
    encode_tcc,
    encode_tdltl,
    mc_tcc_loop,
    tcc_property,
    to_smv,
)
from .tdltl.ast import TRUE
from .tdltl.parser import parse_initial, parse_tdltl
from .verification import INITIALISED, UNROLLED, mc, trans_smt
from .verification.mc import BOUND_EXCEEDED, INCREMENTAL, INVALID, UPFRONT, VALID

EXIT_OK, EXIT_INVALID, EXIT_BOUND = 0, 1, 2
EXIT_USAGE, EXIT_INPUT, EXIT_TOOL = 10, 11, 12

MSG_BOUND = "terminated after reaching maximum bound"
MSG_NO_TRANSIENT = "the transient does not exist"
BUNDLED = "bundled:"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunRecord:
    command: list
    inputs: dict
    outcome: str
    l: int | None = None
    c: int | None = None
    k: int | None = None
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)


# inputs


def read_input(path: str) -> tuple[str, str]:
    """Text and display name of a file, or of a bundled fixture (bundled:NAME)."""
    if path.startswith(BUNDLED):
        name = path[len(BUNDLED):]
        res = resources.files("mplcheck.data") / name
        if not res.is_file():
            raise FileNotFoundError(f"no bundled fixture named {name!r}")
        return res.read_text(), path
    return Path(path).read_text(), path


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class Inputs:
    def __init__(self):
        self.digests = {}

    def text(self, path):
        text, name = read_input(path)
        self.digests[name] = digest(text)
        return text, name

    def matrix(self, path):
        text, name = self.text(path)
        return parse_matrix(text, name)

    def initial(self, path, n):
        if path is None:
            return TRUE
        text, name = self.text(path)
        return parse_initial(text, n, name)

    def formula(self, path, n):
        text, name = self.text(path)
        return parse_tdltl(text, n, name)


def _transient_exit(tr: TransientResult):
    if tr.is_found:
        return EXIT_OK
    return EXIT_BOUND


def _describe_transient(tr: TransientResult) -> str:
    if tr.is_found:
        return f"transient l={tr.l}, cyclicity c={tr.c}"
    if tr.outcome == TransientResult.NO_TRANSIENT:
        return MSG_NO_TRANSIENT
    return MSG_BOUND


# commands


def cmd_transient(args, inputs: Inputs):
    A = inputs.matrix(args.matrix)
    stats = SolverStats()
    if args.algo == "cone":
        U = inputs.matrix(args.init) if args.init else identity(A.rows)
        tr = trans_cone(A, U, args.max_bound)
    elif args.algo == "smt":
        X = inputs.initial(args.init, A.rows)
        tr = trans_smt(A, X, args.max_bound, stats=stats)
    else:
        X = inputs.initial(args.init, A.rows)
        checker = ExternalChecker(args.checker) if args.checker else SamplingChecker(A, X, samples=args.samples, seed=args.seed)
        tr = mc_tcc_loop(A, X, checker, args.max_bound)
    print(_describe_transient(tr))
    rec = RunRecord([], inputs.digests, tr.outcome, tr.l, tr.c, None if not tr.is_found else tr.l + tr.c - 1, stats=stats.as_dict())
    return _transient_exit(tr), rec


def cmd_check(args, inputs: Inputs):
    A = inputs.matrix(args.matrix)
    X = inputs.initial(args.init, A.rows)
    phi = inputs.formula(args.formula, A.rows)
    v = mc(A, X, phi, args.max_bound, args.style, args.schedule)
    print(v.describe())
    detail = {}
    if v.kind == INVALID:
        detail = {
            "counterexample": [format_scalar(a) for a in v.counterexample.to_list()],
            "lasso": {"k": v.lasso.k, "l": v.lasso.l, "alpha": format_scalar(v.lasso.alpha)},
        }
    elif v.kind == BOUND_EXCEEDED:
        detail = {"reason": v.reason}
    code = {VALID: EXIT_OK, INVALID: EXIT_INVALID, BOUND_EXCEEDED: EXIT_BOUND}[v.kind]
    return code, RunRecord([], inputs.digests, v.kind, v.l, v.c, v.k, stats=v.stats.as_dict(), detail=detail)


def cmd_encode(args, inputs: Inputs):
    A = inputs.matrix(args.matrix)
    X = inputs.initial(args.init, A.rows)
    lam = args.lam
    if args.kind == "basic":
        model = encode_sts_basic(A, X)
    elif args.kind == "looping":
        model = encode_sts_looping(A, X, lam)
    elif args.kind == "tcc":
        model = encode_tcc(A, X, lam).with_specs(tcc_property(args.k0, args.cyc, A.rows))
    elif args.spec:
        model = encode_tdltl(A, X, inputs.formula(args.spec, A.rows), lam)
    else:
        model = encode_monitors(A, X, set(), lam)
    if args.spec and args.kind != "monitors":
        raise UsageError("--spec is only used with --kind monitors")
    text = to_smv(model)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    return EXIT_OK, RunRecord([], inputs.digests, "encoded", detail={"kind": args.kind})


def cmd_genbench(args, inputs: Inputs):
    paths = generate(args.out, args.dim, args.finite_per_row, args.count, args.seed, args.formulas, args.size)
    print(f"wrote {len(paths)} files to {args.out}")
    return EXIT_OK, RunRecord([], {}, "generated", detail={"files": len(paths)})


def cmd_simulate(args, inputs: Inputs):
    A = inputs.matrix(args.matrix)
    x0 = inputs.matrix(args.vector)
    if x0.cols != 1:
        raise UsageError("the vector file must hold a single column")
    orbit = simulate(A, x0, args.steps)
    for k, s in enumerate(orbit.states):
        print(f"x({k}) = [{', '.join(format_scalar(a) for a in s.to_list())}]")
    w = detect_lasso(orbit)
    if w is None:
        print(f"no lasso within {args.steps} steps")
        return EXIT_BOUND, RunRecord([], inputs.digests, "no_lasso")
    print(f"({w.k},{w.l})-lasso: x({w.k + 1}) = {format_scalar(w.alpha)} + x({w.l})")
    return EXIT_OK, RunRecord([], inputs.digests, "lasso", w.l, w.k - w.l + 1, w.k, detail={"alpha": format_scalar(w.alpha)})


def _bench_one(job):
    path, algos, max_bound = job
    A = parse_matrix(Path(path).read_text(), str(path))
    rows = []
    for algo in algos:
        start = time.perf_counter()
        if algo == "cone":
            tr = trans_cone(A, identity(A.rows), max_bound)
        else:
            tr = trans_smt(A, TRUE, max_bound)
        rows.append(
            {
                "instance": Path(path).name,
                "n": A.rows,
                "algo": algo,
                "outcome": tr.outcome,
                "l": tr.l,
                "c": tr.c,
                "seconds": round(time.perf_counter() - start, 6),
            }
        )
    return rows


def cmd_bench(args, inputs: Inputs):
    paths = sorted(Path(args.dir).glob("*.mat"))
    if not paths:
        raise UsageError(f"no .mat files in {args.dir}")
    algos = args.algo.split(",")
    for a in algos:
        if a not in ("cone", "smt"):
            raise UsageError(f"unknown algorithm {a!r} (choose cone, smt)")
    jobs = [(str(p), algos, args.max_bound) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    rows = [r for rs in results for r in rs]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.csv:
            out.close()
    disagree = 0
    if len(algos) > 1:
        for rs in results:
            if len({(r["outcome"], r["l"], r["c"]) for r in rs}) > 1:
                disagree += 1
    print(f"{len(paths)} instances, {disagree} disagreements", file=sys.stderr)
    return EXIT_OK if not disagree else EXIT_INVALID, RunRecord([], {}, "bench", detail={"instances": len(paths), "disagreements": disagree})


# argument parsing


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _natural(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _rational(text):
    from .maxplus import parse_scalar

    try:
        return parse_scalar(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mplcheck", description="Transient analysis and TDLTL model checking of max-plus linear systems.")
    p.add_argument("--version", action="version", version=f"mplcheck {__version__}")
    p.add_argument("--record", metavar="FILE", help="append a JSON run record to FILE ('-' for stdout)")
    # also accepted after the command name; SUPPRESS keeps a global value intact
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--record", metavar="FILE", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("transient", parents=[common], help="transient and cyclicity of a matrix or of a set of initial states")
    t.add_argument("matrix")
    t.add_argument("init", nargs="?", help="cone columns (cone) or initial-condition formula (smt, sts)")
    t.add_argument("--algo", choices=("cone", "smt", "sts"), default="cone")
    t.add_argument("--max-bound", type=_positive, default=1000)
    t.add_argument("--checker", help="external SMV model checker command for --algo sts")
    t.add_argument("--samples", type=_positive, default=200, help="initial states tried by the embedded checker")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_transient)

    c = sub.add_parser("check", parents=[common], help="decide (A, X) |= phi")
    c.add_argument("matrix")
    c.add_argument("init")
    c.add_argument("formula")
    c.add_argument("--style", choices=(UNROLLED, INITIALISED), default=UNROLLED)
    c.add_argument("--schedule", choices=(INCREMENTAL, UPFRONT), default=INCREMENTAL)
    c.add_argument("--max-bound", type=_positive, default=1000)
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("encode", parents=[common], help="write an SMV model of the system")
    e.add_argument("matrix")
    e.add_argument("init", nargs="?")
    e.add_argument("--kind", choices=("basic", "looping", "tcc", "monitors"), default="basic")
    e.add_argument("--spec", help="TDLTL formula file (monitors)")
    e.add_argument("--lam", type=_rational, help="pin the loop variable to this value")
    e.add_argument("--k0", type=_natural, default=0, help="transient guess for the tcc property")
    e.add_argument("--cyc", type=_positive, default=1, help="cyclicity guess for the tcc property")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_encode)

    g = sub.add_parser("genbench", parents=[common], help="generate random irreducible matrices and formulas")
    g.add_argument("--dim", type=_positive, required=True)
    g.add_argument("--finite-per-row", type=_positive, required=True)
    g.add_argument("--count", type=_positive, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--formulas", type=_natural, default=0, help="formulas per matrix")
    g.add_argument("--size", type=_positive, default=4, help="formula size")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_genbench)

    s = sub.add_parser("simulate", parents=[common], help="print an orbit and its first lasso")
    s.add_argument("matrix")
    s.add_argument("vector")
    s.add_argument("--steps", type=_natural, default=10)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", parents=[common], help="run transient algorithms over a directory of matrices")
    b.add_argument("dir")
    b.add_argument("--algo", default="cone,smt", help="comma-separated: cone, smt")
    b.add_argument("--max-bound", type=_positive, default=1000)
    b.add_argument("--jobs", type=_positive, default=1)
    b.add_argument("--csv", help="write results here instead of stdout")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    inputs = Inputs()
    start = time.perf_counter()
    try:
        code, record = args.func(args, inputs)
    except UsageError as exc:
        print(f"mplcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleParams as exc:
        print(f"mplcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError) as exc:
        print(f"mplcheck: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CheckerUnavailable, SolverError) as exc:
        print(f"mplcheck: error: {exc}", file=sys.stderr)
        return EXIT_TOOL
    except MplError as exc:
        print(f"mplcheck: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    record.command = ["mplcheck"] + argv
    record.wall_time = round(time.perf_counter() - start, 6)
    if args.record:
        line = record.to_json()
        if args.record == "-":
            print(line)
        else:
            with open(args.record, "a") as fh:
                fh.write(line + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
