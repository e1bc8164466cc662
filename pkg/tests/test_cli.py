import json
import math

import numpy as np
import pytest

from conftest import circle, helix
from filament.cli import main
from filament.curves import write_curve_csv


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_curve_csv("circle.csv", circle(128))
    write_curve_csv("helix.csv", helix(256))
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_hasimoto_circle(work):
    assert run("hasimoto", "circle.csv", "-o", "q.json") == 0
    d = json.loads((work / "q.json").read_text())
    z = np.array(d["samples"])
    assert np.max(np.abs(z[:, 0] - 1)) < 1e-8 and np.max(np.abs(z[:, 1])) < 1e-8
    assert d["phase"] == 0


def test_hasimoto_helix_needs_allow_open(work, capsys):
    assert run("hasimoto", "helix.csv", "-o", "h.json") == 1
    err = capsys.readouterr().err
    assert "curve not closed" in err and err.count("\n") == 1
    assert run("hasimoto", "helix.csv", "--allow-open", "-o", "h.json") == 0
    d = json.loads((work / "h.json").read_text())
    assert abs(d["phase"] - math.pi) < 1e-8
    assert abs(d["suggested_alpha"] + 0.5) < 1e-8


def test_spectrum_refuses_quasi_periodic(work, capsys):
    run("hasimoto", "helix.csv", "--allow-open", "-o", "h.json")
    assert run("spectrum", "h.json") == 1
    err = capsys.readouterr().err
    assert "apply gauge first" in err and "alpha = -0.5" in err
    assert run("gauge", "h.json", "-o", "g.json") == 0
    assert abs(json.loads((work / "g.json").read_text())["phase"]) < 1e-12


def test_spectrum_of_circle(work):
    run("hasimoto", "circle.csv", "-o", "q.json")
    assert run("spectrum", "q.json", "--lambda-min", -2.5, "--lambda-max", 2.5,
               "--grid", 101, "-o", "s.json", "--scan", "s.csv") == 0
    rep = json.loads((work / "s.json").read_text())
    lams = [r["lambda"] for r in rep]
    assert np.allclose(lams, [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-8)
    gaps = [r["closure_gap"] for r in rep]
    assert np.allclose(gaps, [math.pi * math.sqrt(3), 0, math.pi * math.sqrt(3)], atol=1e-6)
    assert (work / "s.csv").read_text().startswith("lambda,re_delta,im_delta\n")


@pytest.mark.parametrize("lam0,verdict", [(0, "Closed"), (math.sqrt(3), "FramePeriodicNotClosed"),
                                          (0.25, "NotFramePeriodic")])
def test_reconstruct(work, capsys, lam0, verdict):
    run("hasimoto", "circle.csv", "-o", "q.json")
    capsys.readouterr()
    assert run("reconstruct", "q.json", "--lambda0", repr(lam0), "-o", "c.csv") == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == verdict
    closed_line = (work / "c.csv").read_text().splitlines()[0]
    assert closed_line == f"# closed={'true' if verdict == 'Closed' else 'false'}"


def test_closure_command(work, capsys):
    run("hasimoto", "circle.csv", "-o", "q.json")
    assert run("closure", "q.json", "--lambda0", repr(math.sqrt(3)), "-o", "r.json") == 0
    rep = json.loads((work / "r.json").read_text())
    assert abs(rep["spectral"]["gap"] - math.pi * math.sqrt(3)) < 1e-6
    assert abs(rep["geometric"]["gap_norm"] - math.pi * math.sqrt(3)) < 1e-6


def test_surface_and_deform(work):
    assert run("surface-from-constant", "--c", 1, "-o", "s0.json") == 0
    d = json.loads((work / "s0.json").read_text())
    assert d["genus"] == 0 and abs(d["coeffs"][0]) < 1e-12
    assert run("deform", "s0.json", "--steps", 4, "-o", "zero.jsonl") == 0
    rows = [json.loads(l) for l in (work / "zero.jsonl").read_text().splitlines()]
    assert len(rows) == 5 and all(r["monitors"]["period_drift"] < 1e-12 for r in rows)
    assert run("deform", "s0.json", "--controls", "1", "--steps", 20, "-o", "g0.jsonl") == 0
    rows = [json.loads(l) for l in (work / "g0.jsonl").read_text().splitlines()]
    assert max(r["monitors"]["period_drift"] for r in rows) < 1e-6


def test_deform_filament_needs_real_zero(work, capsys):
    (work / "s.json").write_text(json.dumps(
        {"genus": 1, "branch_points_upper": [[-0.3, 2], [0.3, 2]]}))
    assert run("deform", "s.json", "--filament", "--controls", "1,1") == 1
    assert "no real quasimomentum zero designated" in capsys.readouterr().err


def test_filament_deformation(work):
    assert run("surface-from-constant", "--c", 1, "--open-gap", 2, "-o", "s1.json") == 0
    assert run("deform", "s1.json", "--filament", "--controls", "0.2,0", "--steps", 10,
               "--xi-end", 0.05, "-o", "t.jsonl") == 0
    rows = [json.loads(l) for l in (work / "t.jsonl").read_text().splitlines()]
    assert max(r["monitors"].get("p_mu0_drift", 0) for r in rows) < 1e-6


def test_controls_table(work):
    run("surface-from-constant", "--c", 1, "-o", "s0.json")
    (work / "tab.json").write_text(json.dumps([[0, [1.0]], [0.25, [-0.5]]]))
    assert run("deform", "s0.json", "--controls-table", "tab.json", "--steps", 10,
               "-o", "t.jsonl") == 0
    rows = [json.loads(l) for l in (work / "t.jsonl").read_text().splitlines()]
    # b^2 = 1 + 2 (0.25) - 2 (0.5)(0.25), up to the RK4 error with h = 0.05
    assert abs(rows[-1]["branch_points_upper"][0][1] ** 2 - 1.25) < 1e-6


def test_config_precedence_and_emit(work, capsys):
    (work / "cfg.json").write_text(json.dumps({"lambda0": 1.5, "input": "q.json"}))
    assert run("closure", "--config", "cfg.json", "--emit-config") == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["lambda0"] == 1.5 and cfg["input"] == "q.json" and cfg["command"] == "closure"
    assert run("closure", "--config", "cfg.json", "--lambda0", "0.5", "--emit-config") == 0
    assert json.loads(capsys.readouterr().out)["lambda0"] == 0.5


def test_validation_exit_codes(work, capsys):
    assert run("spectrum", "missing.json") == 1
    assert run("bogus") == 1
    (work / "cfg.json").write_text(json.dumps({"nonsense": 1}))
    assert run("spectrum", "--config", "cfg.json") == 1
    assert run("spectrum", "x.json", "--grid", 1) == 1
    for line in capsys.readouterr().err.splitlines():
        assert line.startswith("filament: error:")


def test_numerical_exit_code(work, capsys):
    # a stiff lambda range that the fixed-step integrator refuses
    run("hasimoto", "circle.csv", "-o", "q.json")
    assert run("spectrum", "q.json", "--lambda-min", 0, "--lambda-max", 5000, "--grid", 3) == 2
    assert capsys.readouterr().err.startswith("filament: numerical error:")


def test_seeded_surface_is_deterministic(work):
    run("surface-from-constant", "--open-gap", 2, "--seed", 7, "-o", "a.json")
    run("surface-from-constant", "--open-gap", 2, "--seed", 7, "-o", "b.json")
    assert (work / "a.json").read_bytes() == (work / "b.json").read_bytes()
