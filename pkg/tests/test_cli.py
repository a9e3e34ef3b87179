import json
import subprocess
import sys

import numpy as np
import pytest

from stabforge.cli import main


def cli(*args, cwd=None):
    proc = subprocess.run([sys.executable, "-m", "stabforge", *args], capture_output=True, text=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


def test_code_build_and_soundness(tmp_path, capsys):
    out = tmp_path / "code.json"
    assert main(["code", "build", "--family", "rm", "--t", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["code"]["n"] == 4 and data["code"]["k"] == 2
    assert main(["code", "soundness", "--family", "rm", "--t", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["method"] == "exhaustive"
    assert rep["rho_float"] >= 1 / 6


def test_config_file_fills_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "hadamard", "t": 3}))
    assert main(["code", "distance", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["distance"] == 4


def test_pres_commands(capsys):
    assert main(["pres", "length", "--kind", "std_z2k", "--k", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["length"] == 10
    assert main(["pres", "sample", "--kind", "std_z2k", "--k", "3", "--count", "5", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    assert main(["pres", "sample", "--kind", "std_z2k", "--k", "3", "--count", "5", "--seed", "1"]) == 0
    assert capsys.readouterr().out == first


def test_stab_graph_rep_and_defect(tmp_path, capsys):
    assert main(["stab", "graph-rep", "--k", "4", "--edges", "0-1,2-3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert abs(rep["defect"] - 1 / 3) <= 1e-12
    assign = tmp_path / "a.json"
    assign.write_text(json.dumps(rep["assignment"]))
    pres = tmp_path / "p.json"
    assert main(["pres", "build", "--kind", "std_z2k", "--k", "4", "--out", str(pres)]) == 0
    assert main(["stab", "defect", "--pres", str(pres), "--assignment", str(assign)]) == 0
    assert abs(json.loads(capsys.readouterr().out)["epsilon"] - 1 / 3) <= 1e-12


def test_stab_kappa(capsys):
    assert main(["stab", "kappa", "--k", "5", "--dist", "basis"]) == 0
    assert json.loads(capsys.readouterr().out)["kappa"] == "5/2"


def test_game_roundtrip_through_files(tmp_path):
    game = tmp_path / "g.json"
    strat = tmp_path / "s.json"
    value = tmp_path / "v.json"
    assert main(["game", "build", "--kind", "braiding", "--t", "2", "--out", str(game)]) == 0
    assert main(["game", "perfect", "--kind", "braiding", "--t", "2", "--out", str(strat)]) == 0
    assert main(["game", "value", "--game", str(game), "--strategy", str(strat), "--out", str(value)]) == 0
    assert abs(json.loads(value.read_text())["omega"] - 1) <= 1e-9


def test_corrupted_strategy_exits_one(tmp_path):
    game = tmp_path / "g.json"
    strat = tmp_path / "s.json"
    assert main(["game", "build", "--kind", "commutation", "--out", str(game)]) == 0
    assert main(["game", "perfect", "--kind", "commutation", "--out", str(strat)]) == 0
    data = json.loads(strat.read_text())
    q = next(iter(data["pvms"]))
    P = np.array(data["pvms"][q])
    data["pvms"][q] = (P * 0.5).tolist()
    strat.write_text(json.dumps(data))
    code, _, err = cli("game", "value", "--game", str(game), "--strategy", str(strat))
    assert code == 1
    payload = json.loads(err)
    assert payload["error"] == "validation"
    assert payload["invariant"] == "projective"


def test_invalid_input_exits_two(tmp_path):
    code, _, err = cli("run", "--kind", "battery")
    assert code == 2
    assert "seed" in json.loads(err)["message"]
    code, _, err = cli("game", "dimbound", "--k", "3", "--delta", "1")
    assert code == 2 and json.loads(err)["error"]
    code, _, _ = cli("code", "build", "--family", "golay")
    assert code == 2
    code, _, err = cli("stab", "defect", "--pres", str(tmp_path / "missing.json"), "--assignment", "x")
    assert code == 2 and json.loads(err)["error"]


def test_run_writes_report_and_csv(tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = cli("run", "--kind", "graph-defect", "--param", "k=4", "--param", 'edges="0-1,2-3"', "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["passed"]
    csv_out = tmp_path / "sweep.csv"
    code, _, _ = cli("run", "--kind", "extraction-sweep", "--param", "points=3", "--seed", "0", "--format", "csv", "--out", str(csv_out))
    assert code == 0
    assert csv_out.read_text().startswith("theta,")


def test_run_reproducible_modulo_timestamp(tmp_path):
    out = tmp_path / "r.json"
    texts = []
    for _ in range(2):
        assert cli("run", "--kind", "battery", "--param", "trials=25", "--seed", "7", "--out", str(out))[0] == 0
        data = json.loads(out.read_text())
        data.pop("timestamp")
        texts.append(json.dumps(data, indent=2, sort_keys=True))
    assert texts[0] == texts[1]


def test_verify_exit_code():
    code, out, _ = cli("verify", "--suite", "pauli")
    assert code == 0
    assert json.loads(out)["passed"]
