import json
import subprocess
import sys

import pytest

from fbmdrift.cli import main, parse_scales
from fbmdrift.driftfn import ab_system
from fbmdrift.io import dump_system


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dims_ab(capsys):
    code, out, _ = run(capsys, "dims", "ab", "--hurst", "0.5")
    doc = json.loads(out)
    assert code == 0
    assert round(doc["hausdorff"], 4) == 1.5179
    assert round(doc["minkowski"], 4) == 1.6131
    assert round(doc["parabolic"], 4) == 1.0807
    assert round(doc["perturbed_graph"], 4) == 1.5807
    assert doc["comparison"]["strict_lower"] and doc["comparison"]["strict_upper"]


def test_dims_from_file(capsys, tmp_path):
    path = tmp_path / "ab.json"
    dump_system(ab_system(), path)
    code, out, _ = run(capsys, "dims", str(path))
    assert code == 0 and json.loads(out)["parabolic"] == pytest.approx(1.08074032921210)


def test_dims_full_pattern(capsys, tmp_path):
    path = tmp_path / "full.json"
    path.write_text(json.dumps({"n": 6, "m": 2, "cells": [[a, b] for a in range(6) for b in range(2)]}))
    code, out, _ = run(capsys, "dims", str(path))
    doc = json.loads(out)
    assert code == 0
    assert doc["hausdorff"] == pytest.approx(2) and doc["minkowski"] == pytest.approx(2)
    assert doc["perturbed_graph"] is None
    assert doc["status"]["perturbed_graph"]["condition"] == "not-applicable"


def test_dims_hypothesis_violation(capsys):
    code, out, err = run(capsys, "dims", "ab", "--hurst", "0.3")
    doc = json.loads(out)
    assert code == 3
    assert doc["parabolic"] is None
    assert doc["status"]["parabolic"]["reason"].startswith("log_n(m) >= H")
    assert "parabolic" in err


def test_dims_invalid_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 6, "m": 2, "cells": [[6, 0]]}))
    assert run(capsys, "dims", str(path))[0] == 2
    assert run(capsys, "dims", str(tmp_path / "missing.json"))[0] == 4


def test_eval_f(capsys):
    code, out, _ = run(capsys, "eval-f", "ab", "--x", "0", "--depth", "10")
    assert code == 0 and json.loads(out)["hi_exact"] == "1/1024"
    code, out, _ = run(capsys, "eval-f", "ab", "--x", "1", "--depth", "10")
    assert json.loads(out)["lo_exact"] == "1023/1024"
    code, out, _ = run(capsys, "eval-f", "ab", "--x", "0.5", "--depth", "4")
    assert code == 0
    assert run(capsys, "eval-f", "ab", "--x", "1/x")[0] == 2
    assert run(capsys, "eval-f", "ab", "--x", "3/2")[0] == 2


def test_sample(capsys, tmp_path):
    code, out, _ = run(capsys, "sample", "--hurst", "0.5", "--points", "8", "--seed", "1")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "t,x" and len(lines) == 10 and lines[1] == "0,0"
    path = tmp_path / "p.csv"
    code, out, _ = run(capsys, "sample", "--hurst", "0.5", "--points", "8", "--seed", "1",
                       "--drift", "ab", "--out", str(path))
    assert path.read_text().split("\n")[0] == "t,x,f,x+f"
    first = path.read_bytes()
    run(capsys, "sample", "--hurst", "0.5", "--points", "8", "--seed", "1", "--drift", "ab",
        "--out", str(path))
    assert path.read_bytes() == first


def test_sample_errors(capsys):
    code, _, err = run(capsys, "sample", "--hurst", "0.5", "--points", str(2**20), "--seed", "1",
                       "--method", "dense")
    assert code == 2 and "circulant" in err
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--hurst", "0.5", "--points", "8"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["sample", "--hurst", "1.5", "--points", "8", "--seed", "1"])


def test_estimate_exact(capsys, tmp_path):
    counts = tmp_path / "counts.csv"
    code, out, _ = run(capsys, "estimate", "--system", "ab", "--levels", "1..8",
                       "--counts-out", str(counts))
    doc = json.loads(out)
    assert code == 0 and doc["estimate"] == pytest.approx(1.61315, abs=1e-5)
    assert set(doc) >= {"estimate", "stderr", "r2", "method", "scales"}
    assert counts.read_text().split("\n")[:2] == ["delta,count", "0.16666666666666666,18"]
    assert run(capsys, "estimate", "--system", "ab", "--levels", "1..2")[0] == 2


def test_estimate_points(capsys, tmp_path):
    path = tmp_path / "line.csv"
    path.write_text("t,x\n" + "".join(f"{i / 1024!r},{i / 1024!r}\n" for i in range(1025)))
    code, out, _ = run(capsys, "estimate", "--in", str(path), "--scales", "2^-3..2^-8")
    assert code == 0 and json.loads(out)["estimate"] == pytest.approx(1.0, abs=1e-6)
    assert run(capsys, "estimate", "--in", str(path), "--scales", "0.5,0.25")[0] == 2


def test_estimate_compare(capsys, tmp_path):
    path = tmp_path / "bf.csv"
    run(capsys, "sample", "--hurst", "0.5", "--points", "4096", "--seed", "2", "--drift", "ab",
        "--out", str(path))
    code, out, _ = run(capsys, "estimate", "--in", str(path), "--column", "x+f", "--compare", "f",
                       "--mode", "parabolic", "--hurst", "0.5", "--scales", "4^-2..4^-5")
    doc = json.loads(out)
    assert code == 0 and "difference" in doc["compare"]


def test_parse_scales():
    assert parse_scales("2^-1..2^-3") == [0.5, 0.25, 0.125]
    assert parse_scales("0.5,0.1") == [0.5, 0.1]


def test_reproduce(capsys):
    for target in ("cor15", "remark16", "strict-chain"):
        code, out, _ = run(capsys, "reproduce", target)
        assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "reproduce", "cor15", "--tol", "printed_digits=6")
    assert code == 1 and "FAIL" in out
    assert run(capsys, "reproduce", "cor15", "--tol", "bogus=1")[0] == 2


def test_figures(capsys, tmp_path):
    path = tmp_path / "c.svg"
    assert run(capsys, "figure", "carpet", "--gen", "4", "--out", str(path))[0] == 0
    svg = path.read_text()
    assert 'viewBox="0 0 1000 1000"' in svg and svg.count('class="cell"') == 1296
    code, out, _ = run(capsys, "figure", "carpet", "--gen", "0")
    assert out.count('class="cell"') == 1 and 'width="1000" height="1000" fill' in out
    code, out, _ = run(capsys, "figure", "patterns")
    assert out.count('class="cell"') == 12 and out.count('class="grid"') == 24
    assert run(capsys, "figure", "path")[0] == 2
    code, a, _ = run(capsys, "figure", "path", "--seed", "3", "--points", "256")
    _, b, _ = run(capsys, "figure", "path", "--seed", "3", "--points", "256")
    assert a == b and a.count("<polyline") == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fbmdrift", "reproduce", "strict-chain"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
