import json
import math
import subprocess
import sys

import pytest

from ensvol.cli import main, run


def report(argv):
    code, rep, err = run(argv)
    assert err is None, err
    return code, rep


def test_entropy_mixed_qubit(fixture_path):
    code, rep = report(["entropy", fixture_path("mixed_qubit.json")])
    assert code == 0
    assert math.isclose(rep["results"]["entropy"], math.log(2), rel_tol=1e-14)
    _, rep = report(["entropy", fixture_path("mixed_qubit.json"), "--bits"])
    assert math.isclose(rep["results"]["entropy"], 1.0, rel_tol=1e-14)


def test_entropy_renyi(fixture_path, anchors):
    _, rep = report(["entropy", fixture_path("renyi_joint.json"), "--alpha", "2"])
    assert math.isclose(rep["results"]["entropy"], anchors["renyi2_joint_entropy"], abs_tol=1e-13)


def test_volume_pure_state(fixture_path):
    code, rep = report(["volume", fixture_path("pure_qubit.json")])
    assert code == 0 and rep["results"]["volume"] == 1.0


def test_volume_with_k(fixture_path):
    _, rep = report(["volume", fixture_path("mixed_qubit.json"), "--k", "unused=3"])
    assert math.isclose(rep["results"]["volume"], 2.0)


def test_chi(fixture_path, anchors):
    code, rep = report(["chi", fixture_path("holevo_signal.json")])
    assert code == 0
    assert math.isclose(rep["results"]["chi_nats"], anchors["holevo_chi"], abs_tol=1e-13)
    assert math.isclose(rep["results"]["lanford_robinson"]["slack"], anchors["lanford_robinson_slack"], abs_tol=1e-13)


def test_bounds(fixture_path):
    code, rep = report(["bounds", fixture_path("holevo_signal.json"), "-L", "2", "--codes", "4", "--seed", "3"])
    assert code == 0
    assert len(rep["results"]["block_bounds"]) == 5
    assert rep["checks"]["block_chain"]


def test_gaussian_diffusion(fixture_path):
    code, rep = report(["gaussian", fixture_path("gaussian_unit.json"), "--diffusion", "[[1,0],[0,1]]",
                        "--steps", "100", "--dt", "0.01"])
    vols = rep["results"]["trajectory"]["volumes"]
    assert code == 0 and abs(vols[-1] / vols[0] - 2) < 1e-6


def test_uncertainty_default(anchors):
    code, rep = report(["uncertainty"])
    assert code == 0
    assert abs(rep["results"]["entropic"]["slack"] - anchors["uncertainty_slack"]) < 1e-3


def test_correspondence():
    code, rep = report(["correspondence", "--ratio-at", "1e4"])
    assert code == 0
    assert abs(rep["results"]["points"][0]["ratio"] / 6.2832 - 1) < 1e-3


def test_fuzz_ii():
    code, rep = report(["fuzz", "--axiom", "ii", "--trials", "200", "--seed", "7"])
    assert code == 0 and rep["seed"] == 7
    assert abs(rep["results"]["report"]["details"]["difference"]) < 1e-9


def test_fuzz_renyi_exit_zero_on_violation():
    code, rep = report(["fuzz", "--axiom", "renyi", "--alpha", "2", "--trials", "5000", "--seed", "7"])
    assert code == 0
    assert rep["results"]["report"]["witness"] is not None


def test_fuzz_zero_trials():
    code, rep = report(["fuzz", "--axiom", "iii", "--trials", "0"])
    assert code == 0 and rep["results"]["report"]["trials"] == 0


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("ENSVOL_SEED", "13")
    _, rep = report(["fuzz", "--axiom", "i", "--trials", "3"])
    assert rep["seed"] == 13
    monkeypatch.setenv("ENSVOL_SEED", "x")
    assert run(["fuzz", "--axiom", "i", "--trials", "3"])[0] == 2


def test_check_failure_exit_one(capsys):
    # a one-trial Renyi search from seed 0 finds no counterexample
    code = main(["fuzz", "--axiom", "renyi", "--alpha", "2", "--trials", "1", "--seed", "0"])
    assert code == 1
    captured = capsys.readouterr()
    assert "check failed: violation_found" in captured.err
    assert json.loads(captured.out)["passed"] is False


def test_invalid_input_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "classical", "probabilities": [0.5, 0.6]}')
    assert main(["entropy", str(bad)]) == 2
    assert "normalization" in capsys.readouterr().err
    assert main(["entropy", str(tmp_path / "missing.json")]) == 2
    assert main(["chi", str(bad)]) == 2


def test_wrong_kind_exit_two(fixture_path):
    assert run(["chi", fixture_path("mixed_qubit.json")])[0] == 2


def test_numerical_failure_exit_three(fixture_path, capsys):
    code = main(["gaussian", fixture_path("gaussian_unit.json"), "--drift", "[[-50,0],[0,-50]]",
                 "--dt", "1", "--steps", "50"])
    assert code == 3
    assert "step" in capsys.readouterr().err


def test_output_file(tmp_path, fixture_path):
    out = tmp_path / "r.json"
    assert main(["-o", str(out), "entropy", fixture_path("mixed_qubit.json")]) == 0
    assert json.loads(out.read_text())["tool"] == "ensvol"


@pytest.mark.parametrize("argv", [
    ["fuzz", "--axiom", "i", "--trials", "50", "--seed", "4"],
    ["bounds", "HOLEVO", "-L", "3", "--codes", "3", "--seed", "5"],
    ["uncertainty", "--two-peak", "10"],
])
def test_subprocess_determinism(argv, fixture_path):
    argv = [fixture_path("holevo_signal.json") if a == "HOLEVO" else a for a in argv]
    cmd = [sys.executable, "-m", "ensvol.cli", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    rep = json.loads(a)
    assert rep["command"] == argv and rep["passed"]
