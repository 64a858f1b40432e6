import hashlib
import json
import subprocess
import sys

import pytest

from conftest import bundled
from mplcheck.cli import MSG_BOUND, MSG_NO_TRANSIENT, main
from mplcheck.graph import is_irreducible
from mplcheck.maxplus import EPS, parse_matrix, vector
from mplcheck.sts import parse_smv
from mplcheck.tdltl import eval_bounded, parse_tdltl


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def two_rates(tmp_path):
    p = tmp_path / "two.mat"
    p.write_text("2 2\n1 e\ne 2\n")
    return str(p)


def test_transient_cone(capsys):
    code, out, _ = run(capsys, "transient", "bundled:example1.mat", "bundled:example1_x0.mat")
    assert code == 0 and "l=0" in out and "c=2" in out
    code, out, _ = run(capsys, "transient", "bundled:underground.mat", "bundled:underground_x0.mat")
    assert code == 0 and "l=2" in out and "c=3" in out


def test_transient_failures(capsys, two_rates):
    for algo in ("cone", "smt"):
        code, out, _ = run(capsys, "transient", two_rates, "--algo", algo)
        assert code == 2 and out.strip() == MSG_NO_TRANSIENT
    slow = two_rates.replace("two", "slow")
    open(slow, "w").write("2 2\n0 -1\n-1 -1/1000\n")
    code, out, _ = run(capsys, "transient", slow, "--max-bound", "5")
    assert code == 2 and out.strip() == MSG_BOUND


def test_transient_algorithms_agree(capsys):
    outs = set()
    for algo in ("cone", "smt", "sts"):
        init = [] if algo == "cone" else ["bundled:top.init"]
        code, out, _ = run(capsys, "transient", "bundled:example1.mat", *init, "--algo", algo)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1


def test_transient_sts_missing_checker(capsys):
    code, _, err = run(capsys, "transient", "bundled:example1.mat", "--algo", "sts", "--checker", "no-such-checker")
    assert code == 12 and "not found" in err


def test_check_verdicts(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "bundled:example1.mat", "bundled:example1_sync.init", "bundled:example1_order.tdltl")
    assert code == 0 and out.startswith("Valid")
    rec = tmp_path / "runs.jsonl"
    for style in ("unrolled", "initialised"):
        for schedule in ("incremental", "upfront"):
            code, out, _ = run(
                capsys, "check", "bundled:example1.mat", "bundled:top.init", "bundled:example1_order.tdltl",
                "--style", style, "--schedule", schedule, "--record", str(rec),
            )
            assert code == 1 and out.startswith("Invalid")
    A = parse_matrix(bundled("example1.mat"))
    phi = parse_tdltl(bundled("example1_order.tdltl"), 2)
    lines = rec.read_text().splitlines()
    assert len(lines) == 4
    for line in lines:
        r = json.loads(line)
        assert r["outcome"] == "invalid"
        x0 = vector(r["detail"]["counterexample"])
        w = r["detail"]["lasso"]
        assert not eval_bounded(A, x0, phi, w["k"], w["l"])
        digest = hashlib.sha256(bundled("example1.mat").encode()).hexdigest()[:16]
        assert r["inputs"]["bundled:example1.mat"] == digest
        assert r["stats"]["decisions"] >= 0 and r["wall_time"] >= 0


def test_check_underground(capsys):
    code, out, _ = run(
        capsys, "check", "bundled:underground.mat", "bundled:underground.init", "bundled:underground_phi1.tdltl",
        "--max-bound", "100",
    )
    assert code in (0, 1)
    if code == 1:
        A = parse_matrix(bundled("underground.mat"))
        phi = parse_tdltl(bundled("underground_phi1.tdltl"), 6)
        vals = out.split("[", 1)[1].split("]", 1)[0].split(", ")
        k = int(out.split("k=")[1].split(",")[0])
        l = int(out.split("l=")[1].split(",")[0])
        assert not eval_bounded(A, vector(vals), phi, k, l)


def test_encode(capsys, tmp_path):
    for kind in ("basic", "looping", "tcc", "monitors"):
        target = tmp_path / f"{kind}.smv"
        extra = ["--spec", "bundled:underground_phi3.tdltl"] if kind == "monitors" else []
        code, _, _ = run(capsys, "encode", "bundled:underground.mat", "bundled:underground.init", "--kind", kind, *extra, "-o", str(target))
        assert code == 0
        mod = parse_smv(target.read_text())
        assert mod.specs or kind in ("basic", "looping")
    code, out, _ = run(capsys, "encode", "bundled:example1.mat", "--kind", "looping", "--lam", "7/2")
    assert code == 0 and "lam = f'7/2" in out
    code, _, _ = run(capsys, "encode", "bundled:example1.mat", "--kind", "basic", "--spec", "bundled:example1_order.tdltl")
    assert code == 10


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "bundled:example1.mat", "bundled:example1_x0.mat", "--steps", "3")
    assert code == 0
    assert out.splitlines()[:4] == ["x(0) = [0, 0]", "x(1) = [5, 3]", "x(2) = [8, 8]", "x(3) = [13, 11]"]
    assert "(1,0)-lasso" in out and "8 + x(0)" in out
    code, out, _ = run(capsys, "simulate", "bundled:underground.mat", "bundled:underground_x0.mat", "--steps", "7")
    assert "x(1) = [180, 360, e, 180, 300, e]" in out and "(4,2)-lasso" in out and "900" in out
    code, out, _ = run(capsys, "simulate", "bundled:underground.mat", "bundled:underground_x0.mat", "--steps", "2")
    assert code == 2 and "no lasso" in out


def test_genbench(capsys, tmp_path):
    code, _, _ = run(capsys, "genbench", "--dim", "2", "--finite-per-row", "2", "--count", "5", "--seed", "1", "--out", str(tmp_path / "g2"))
    assert code == 0
    for p in sorted((tmp_path / "g2").glob("*.mat")):
        A = parse_matrix(p.read_text())
        assert all(a is not EPS for row in A.entries for a in row)
    dirs = []
    for name in ("a", "b"):
        out = tmp_path / name
        run(capsys, "genbench", "--dim", "40", "--finite-per-row", "20", "--count", "10", "--seed", "7", "--out", str(out))
        dirs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert dirs[0] == dirs[1] and len(dirs[0]) == 10
    assert all(is_irreducible(parse_matrix(b.decode())) for b in dirs[0].values())
    code, _, err = run(capsys, "genbench", "--dim", "3", "--finite-per-row", "4", "--count", "1", "--seed", "0", "--out", str(tmp_path / "bad"))
    assert code == 10 and "1 <= m <= n" in err


def test_bench(capsys, tmp_path):
    run(capsys, "genbench", "--dim", "4", "--finite-per-row", "2", "--count", "4", "--seed", "3", "--out", str(tmp_path / "g"))
    csv_path = tmp_path / "out.csv"
    code, _, err = run(capsys, "bench", str(tmp_path / "g"), "--jobs", "2", "--csv", str(csv_path))
    assert code == 0 and "0 disagreements" in err
    rows = csv_path.read_text().splitlines()
    assert rows[0].startswith("instance,n,algo,outcome,l,c") and len(rows) == 1 + 8
    code, _, _ = run(capsys, "bench", str(tmp_path / "empty"))
    assert code == 10


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_text("2 2\n1 2\n3 x\n")
    code, _, err = run(capsys, "transient", str(bad))
    assert code == 11 and "line 3" in err
    code, _, _ = run(capsys, "transient", "missing.mat")
    assert code == 11
    code, _, _ = run(capsys, "transient", "bundled:nope.mat")
    assert code == 11
    f = tmp_path / "f.tdltl"
    f.write_text("G(x1 - x3 > 0)\n")
    code, _, err = run(capsys, "check", "bundled:example1.mat", "bundled:top.init", str(f))
    assert code == 11


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["transient", "bundled:example1.mat", "--max-bound", "0"])
    assert exc.value.code == 10
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 10


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "mplcheck.cli", "check", "bundled:example1.mat", "bundled:top.init", "bundled:example1_order.tdltl"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1 and "Invalid" in proc.stdout
