import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from hamca import cli
from hamca.io import sha256_file

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, name, *extra, config=None):
    out = tmp_path / name
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        args = ["--config", str(path)]
    else:
        args = ["--config", str(CONFIGS / f"{name}.json")]
    code = cli.main([*args, "--out", str(out), *extra])
    return code, out


def test_cycle_pauli(tmp_path, capsys):
    code, out = run(tmp_path, "pauli_cycle")
    assert code == 0
    rep = json.loads((out / "cycle.json").read_text())
    assert (rep["antiperiod"], rep["period"], rep["ontological"]) == (6, 12, True)


def test_dispersion_table(tmp_path, capsys):
    code, out = run(tmp_path, "dispersion")
    assert code == 0
    table = next(out.glob("dispersion.*"))
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 17
    first, last = rows[0], rows[-1]
    vals = [float(v) for v in first.values()]
    assert vals[0] == -2.0 and vals[1] == pytest.approx(-math.pi / 2, abs=1e-15)
    vals = [float(v) for v in last.values()]
    assert vals[0] == 2.0 and vals[1] == pytest.approx(math.pi / 2, abs=1e-15)


def test_missing_command(tmp_path, capsys):
    code, out = run(tmp_path, "empty", config={"H": [["1"]]})
    assert code == cli.EXIT_CONFIG
    rec = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert rec["error"] == "config" and rec["exit_code"] == 2
    assert json.loads((out / "error.json").read_text()) == rec


def test_not_self_adjoint(tmp_path, capsys):
    code, _ = run(tmp_path, "nsa", config={"command": "evolve", "H": [["0", "1"], ["2", "0"]],
                                          "psi0": ["1", "0"], "psi1": ["0", "1"], "N": 3})
    assert code == cli.EXIT_CONFIG


def test_bad_flag(capsys):
    assert cli.main(["--format", "xml"]) == cli.EXIT_CONFIG
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "config"


def test_band_edge_precondition(tmp_path, capsys):
    code, _ = run(tmp_path, "edge", config={"command": "closed-form", "H": [["2", "0"], ["0", "1"]],
                                           "psi0": ["1", "0"], "psi1": ["0", "1"], "N": 10})
    assert code == cli.EXIT_PRECONDITION
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "precondition"


@pytest.mark.parametrize("name", ["pauli_evolve", "conserve_random", "closed_form", "reconstruct_stationary",
                                  "multi_pauli"])
def test_deterministic(tmp_path, capsys, name):
    c1, a = run(tmp_path / "a", name, "--seed", "7")
    c2, b = run(tmp_path / "b", name, "--seed", "7")
    assert c1 == c2 == 0
    ma = json.loads((a / "manifest.json").read_text())
    assert ma["outputs"] and ma["seed"] == 7 and ma["command"]
    for fname, digest in ma["outputs"].items():
        assert sha256_file(b / fname) == digest == sha256_file(a / fname)
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


def test_manifest_contents(tmp_path, capsys):
    code, out = run(tmp_path, "pauli_evolve")
    man = json.loads((out / "manifest.json").read_text())
    assert set(man["versions"]) >= {"hamca", "python", "numpy"}
    assert len(man["config_sha256"]) == 64
    assert "history.jsonl" in man["outputs"]


def test_format_flag(tmp_path, capsys):
    code, out = run(tmp_path, "pauli_evolve", "--format", "jsonl")
    assert code == 0
    assert any(p.suffix == ".jsonl" and p.name != "history.jsonl" for p in out.iterdir())


def test_suite_corrupted_fixture(tmp_path, capsys):
    cfg = {"command": "suite", "seed": 0,
           "suite": {"only": [1], "pauli": {"H": [["0", "1"], ["1", "1"]], "psi0": ["1", "0"], "psi1": ["0", "1"]}}}
    code, out = run(tmp_path, "bad_suite", config=cfg)
    assert code == cli.EXIT_ACCEPTANCE
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["overall"] == "fail" and verdict["failed"] == [1]


def test_suite_capped_skips(tmp_path, capsys):
    cfg = {"command": "suite", "seed": 0, "suite": {"max_steps": 0, "only": [1, 2, 4, 6]}}
    code, out = run(tmp_path, "capped", config=cfg)
    assert code == 0
    status = {c["id"]: c["status"] for c in json.loads((out / "verdict.json").read_text())["criteria"]}
    assert status == {1: "skipped", 2: "skipped", 4: "skipped", 6: "pass"}
    man = json.loads((out / "manifest.json").read_text())
    assert man["unchecksummed"] == ["timings.json"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hamca", "--config", str(CONFIGS / "pauli_cycle.json"),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.strip().splitlines()[-1])["period"] == 12
