import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from bcclab import continuity
from bcclab.channels import random_compound
from bcclab.cli import build_parser, run
from bcclab.io import compound_to_dict


@pytest.fixture
def compound_file(tmp_path):
    c = random_compound(np.random.default_rng(0), 2, 2, 2, 2)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(compound_to_dict(c)))
    return path


def _channel(tmp_path, name, rows):
    p = tmp_path / name
    p.write_text(json.dumps({"inputs": len(rows), "outputs": len(rows[0]), "rows": rows}))
    return p


def test_region_compute_writes_csv_and_hull(tmp_path, compound_file):
    out = tmp_path / "r" / "points.csv"
    code = run(["region", "compute", "--input", str(compound_file), "--grid", "2", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["n", "R0", "R1", "aux_id"]
    hull = json.loads((out.parent / "hull.json").read_text())
    assert hull["label"] == "inner approximation" and hull["vertices"]


def test_region_compute_n_max(tmp_path, compound_file):
    out, hull = tmp_path / "p.csv", tmp_path / "h.json"
    code = run(["region", "compute", "--input", str(compound_file), "--n-max", "2", "--grid", "2",
                "--u-size", "2", "--v-size", "2", "--out", str(out), "--hull-out", str(hull)])
    assert code == 0
    assert {r["n"] for r in csv.DictReader(out.open())} == {"1", "2"}
    assert json.loads(hull.read_text())["n_values"] == [1, 2]


def test_region_compute_is_byte_identical(tmp_path, compound_file):
    outs = []
    for k in range(2):
        out = tmp_path / f"p{k}.csv"
        run(["region", "compute", "--input", str(compound_file), "--grid", "3", "--max-aux", "300",
             "--out", str(out), "--hull-out", str(tmp_path / f"h{k}.json")])
        outs.append((out.read_bytes(), (tmp_path / f"h{k}.json").read_bytes()))
    assert outs[0] == outs[1]


def test_distance_channels(tmp_path, capsys):
    a = _channel(tmp_path, "a.json", [[1, 0, 0], [0, 0, 1]])
    b = _channel(tmp_path, "b.json", [[1, 0, 0], [0, 0.3, 0.7]])
    assert run(["distance", "channels", "--a", str(a), "--b", str(b)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(0.6) and out["witness"] == {"input": 1}


def test_distance_compound(tmp_path, compound_file):
    out = tmp_path / "d.json"
    assert run(["distance", "compound", "--a", str(compound_file), "--b", str(compound_file), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["value"] == 0.0


def test_distance_regions(tmp_path, capsys):
    a = tmp_path / "a.csv"
    a.write_text("n,R0,R1,aux_id\n1,0,0,0\n")
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"vertices": [[1, 2]]}))
    assert run(["distance", "regions", "--a", str(a), "--b", str(b)]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 3.0


def test_missing_file_exit_2(tmp_path):
    assert run(["distance", "channels", "--a", str(tmp_path / "nope.json"), "--b", str(tmp_path / "x.json")]) == 2


def test_invalid_matrix_exit_2(tmp_path):
    a = _channel(tmp_path, "a.json", [[0.6, 0.6], [0, 1]])
    assert run(["distance", "channels", "--a", str(a), "--b", str(a)]) == 2


def test_bad_arguments_exit_2():
    assert run(["verify", "lemma2", "--eps", "abc"]) == 2
    assert run(["verify", "lemma2", "--eps", "1.5", "--trials", "2"]) == 2
    assert run(["avc", "check", "--lambda", "2"]) == 2


@pytest.mark.parametrize("check, extra", [
    ("lemma2", ["--trials", "20"]),
    ("lemma3", ["--trials", "5", "--n", "2"]),
    ("lemma4", ["--trials", "2", "--aux-per-pair", "5"]),
    ("theorem2", ["--trials", "1", "--grid", "2", "--max-aux", "200"]),
    ("telescope", ["--trials", "5"]),
])
def test_verify_commands_pass(tmp_path, capsys, check, extra):
    out = tmp_path / "rep.json"
    assert run(["verify", check, "--seed", "1", "--out", str(out)] + extra) == 0
    rep = json.loads(out.read_text())
    assert rep["check"] == check and rep["passed"] is True
    assert capsys.readouterr().out.startswith("PASS")


def test_verify_violation_exit_1(monkeypatch, capsys):
    monkeypatch.setattr(continuity, "delta1", lambda eps, y: 0.0)
    assert run(["verify", "lemma2", "--trials", "5"]) == 1
    assert json.loads(capsys.readouterr().out)["violations"] > 0


def test_avc_sweep(capsys):
    assert run(["avc", "sweep", "--lambdas", "0,0.5"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["symmetrizable"] for r in rows] == ["true", "false"]
    assert float(rows[1]["residual"]) == pytest.approx(0.5)


def test_avc_check(tmp_path):
    out = tmp_path / "c.json"
    assert run(["avc", "check", "--lambda", "0", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["symmetrizable"] is True and d["residual"] <= 1e-12


def _subparsers(parser):
    for action in parser._actions:
        if hasattr(action, "choices") and isinstance(action.choices, dict):
            for name, sub in action.choices.items():
                yield name, sub
                yield from _subparsers(sub)


def test_every_flag_is_documented():
    for _, sub in _subparsers(build_parser()):
        text = sub.format_help()
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in text
            if action.option_strings and action.dest != "help":
                assert action.help


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bcclab.cli", "avc", "sweep", "--lambdas", "0"],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 0 and "lambda,symmetrizable,residual" in proc.stdout
