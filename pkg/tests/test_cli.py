import os

import pytest

from darkpath.cli import main


def test_list_names_builtins(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("fig3a", "fig4", "fig7a", "fig9", "fig10"):
        assert name in out


def test_gate_prints_block_and_deviation(capsys):
    assert main(["gate", "--gate", "cnot", "--eta", "4"]) == 0
    out = capsys.readouterr().out
    assert "deviation" in out
    dev = float(out.rsplit(":", 1)[1])
    assert dev <= 1e-4


def test_gate_custom_angles(capsys):
    assert main(["gate", "--theta", "0.0", "--gamma", "3.141592653589793", "--eta", "2"]) == 0
    assert "deviation" in capsys.readouterr().out


def test_synth_csv_schema(capsys):
    assert main(["synth", "--gate", "cnot", "--eta", "4", "--tau", "1.0", "--points", "10"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,omega,omega0,omega1,omega2,phi1,phi2,segment"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert len(first) == 8
    assert first[-1] in ("1", "2")


def test_run_builtin_writes_outputs(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "fig3a", "--out", str(out), "--svg"]) == 0
    assert (out / "fig3a.csv").exists()
    assert (out / "fig3a.svg").exists()
    header = (out / "fig3a.csv").read_text().splitlines()[0]
    assert header.count(",") == 11


def test_run_config_file(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(
        "name = tiny\n"
        "gate = cnot\n"
        "system.n_atoms = 2\n"
        "system.delta_over_kz = 1e6\n"
        "noise.dephasing = off\n"
        "sweep.eta = 4\n"
        "sweep.epsilon = 0\n"
        "calibration.tau = 1.0\n"
    )
    out = tmp_path / "res"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    body = (out / "tiny.csv").read_text().splitlines()
    assert len(body) == 2
    fidelity = float(body[1].split(",")[9])
    assert fidelity == pytest.approx(1.0, abs=1e-4)


def test_run_rejects_unknown_scenario():
    with pytest.raises(SystemExit):
        main(["run", "not-a-scenario", "--out", "/tmp/nowhere"])


def test_run_model_override(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(
        "name = rot\n"
        "gate = cnot\n"
        "system.n_atoms = 2\n"
        "system.delta_over_kz = 1e3\n"
        "noise.dephasing = off\n"
        "sweep.eta = 4\n"
        "sweep.epsilon = 0\n"
        "calibration.tau = 1.0\n"
    )
    out = tmp_path / "res"
    assert main(["run", str(cfg), "--out", str(out), "--model", "rotating"]) == 0
    body = (out / "rot.csv").read_text().splitlines()[1].split(",")
    assert body[2] == "rotating"
