import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from sscc.cli import main

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"


def spec(name):
    return str(SPECS / f"{name}.sscc")


def test_run_containers(tmp_path, capsys):
    out, final = tmp_path / "trace.jsonl", tmp_path / "final.txt"
    assert main(["run", spec("containers"), "--out", str(out), "--final", str(final)]) == 0
    dump = final.read_text()
    assert "0.1.root: Y > 5 and Y < 10" in dump
    assert "2.root: Z != 10" in dump
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert records[-1]["event"] == "end" and records[-1]["gtime"] == "13/5"
    assert all({"event", "uid", "gtime"} <= r.keys() for r in records[:-1])


def test_traces_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        assert main(["run", spec("tasks"), "--seed", "5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_estimate_zero_variance(tmp_path, capsys):
    table = tmp_path / "summary.csv"
    assert main(["estimate", spec("zero_variance"), "--csv", str(table)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["half_width"] == 0.0 and rec["mean"] == 4.25
    rows = list(csv.DictReader(table.open()))
    assert float(rows[0]["half_width"]) == 0.0


def test_estimate_non_convergence():
    assert main(["estimate", spec("tasks"), "--delta", "1e-9", "--max-samples", "20", "--batch", "10"]) == 2


def test_scan_matches(tmp_path):
    out = tmp_path / "m.jsonl"
    assert main(["scan", spec("consistency"), "--out", str(out), "--expect-match"]) == 0
    assert out.read_text().strip()


def test_scan_expect_match_fails():
    assert main(["scan", spec("knowledge"), "--predicate", "equivalent", "--seeds", "0,1", "--expect-match"]) == 2


def test_scan_entails_predicate(tmp_path):
    out = tmp_path / "m.jsonl"
    assert main(["scan", spec("knowledge"), "--predicate", "entails:Y > 9", "--seeds", "0:2",
                 "--out", str(out)]) == 0
    stores = {(r["agents"][0], r["stores"][0]) for r in map(json.loads, out.read_text().splitlines())}
    assert ("2.1.root", "W == 5 and Y == 32") in stores


@pytest.mark.parametrize("argv", [
    [],
    ["run"],
    ["frobnicate", "x"],
    ["run", "/nonexistent.sscc"],
    ["estimate", spec("tasks"), "--observable", "nope"],
    ["scan", spec("tasks"), "--seeds", "a:b"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1


def test_bad_spec(tmp_path):
    bad = tmp_path / "bad.sscc"
    bad.write_text("system { maxtime 1 process @ root : tell( }")
    assert main(["run", str(bad)]) == 1


def test_solver_flag(tmp_path, z3_solver):
    out = tmp_path / "t.jsonl"
    assert main(["run", spec("containers"), "--solver", z3_solver.path, "--out", str(out)]) == 0
    ref = tmp_path / "r.jsonl"
    main(["run", spec("containers"), "--out", str(ref)])
    assert out.read_bytes() == ref.read_bytes()


def test_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sscc.cli", "run", spec("zero_variance")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.splitlines()[-1])["gtime"] == "17/4"
