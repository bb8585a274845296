import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stargen import ConfigurationError, PhaseField, PhaseGrid, SpatialGrid, hermite_function
from stargen.cli import main
from stargen.io import read_field, write_field, write_field_csv, write_json, write_table
from stargen.moyal import p_symbol, x_symbol


# --------------------------------------------------------------------- files

def test_phase_field_round_trip(tmp_path, grid64, rng):
    f = PhaseField(grid64, rng.normal(size=grid64.shape) + 1j * rng.normal(size=grid64.shape))
    write_field(tmp_path / "f.sgf", f)
    g = read_field(tmp_path / "f.sgf")
    assert g.grid == grid64
    assert np.array_equal(g.values, f.values)


def test_wave_field_round_trip(tmp_path):
    grid = SpatialGrid.centered(6.0, 100)
    psi = hermite_function(3, grid)
    write_field(tmp_path / "w.sgf", psi, hbar=0.5)
    back = read_field(tmp_path / "w.sgf")
    assert back.grid == grid and np.array_equal(back.values, psi.values)


def test_header_layout(tmp_path, grid64):
    write_field(tmp_path / "f.sgf", PhaseField.constant(grid64, 1.0))
    raw = (tmp_path / "f.sgf").read_bytes()
    assert raw[:4] == b"SGF1"
    assert len(raw) == 4 + 8 + 5 * 8 + 16 * 64 * 64


def test_corrupt_files(tmp_path, grid64):
    (tmp_path / "short").write_bytes(b"SGF")
    with pytest.raises(ConfigurationError):
        read_field(tmp_path / "short")
    write_field(tmp_path / "f.sgf", PhaseField.constant(grid64, 1.0))
    raw = (tmp_path / "f.sgf").read_bytes()
    (tmp_path / "magic").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ConfigurationError):
        read_field(tmp_path / "magic")
    (tmp_path / "cut").write_bytes(raw[:-16])
    with pytest.raises(ConfigurationError):
        read_field(tmp_path / "cut")


def test_csv_outputs_full_precision(tmp_path):
    grid = PhaseGrid.compatible(SpatialGrid.centered(2.0, 8))
    f = PhaseField.constant(grid, 1 / 3 + 2j / 7)
    write_field_csv(tmp_path / "f.csv", f)
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows[0] == ["x", "p", "re", "im"] and len(rows) == 65
    assert float(rows[1][2]) == 1 / 3 and float(rows[1][3]) == 2 / 7
    write_table(tmp_path / "t.csv", ["a", "b"], [(1, 0.1), (2, 1 / 3)])
    assert open(tmp_path / "t.csv").read() == "a,b\n1,0.10000000000000001\n2,0.33333333333333331\n"
    write_json(tmp_path / "j.json", {"b": 1, "a": [0.5]})
    assert json.loads(open(tmp_path / "j.json").read()) == {"a": [0.5], "b": 1}


# ----------------------------------------------------------------------- CLI

def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def single_error_line(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("error: ")


def test_oscillator_default_run(tmp_path, capsys):
    code, out, _ = run(["oscillator", "--out", tmp_path], capsys)
    assert code == 0
    data = json.loads((tmp_path / "eigenvalues.json").read_text())
    assert set(data) >= {"hamiltonian", "grid", "hbar", "eigenvalues", "residuals", "coefficients"}
    assert np.max(np.abs(np.array(data["eigenvalues"]) - (np.arange(8) + 0.5))) < 1e-8
    rows = list(csv.reader(open(tmp_path / "residuals.csv")))
    assert rows[0] == ["j", "k_window", "lambda", "residual"]
    assert len(rows) == 9 and all(float(r[3]) < 1e-6 for r in rows[1:])
    psi = read_field(tmp_path / "psi_3.sgf")
    assert abs(psi.norm() - 1) < 1e-10
    big = read_field(tmp_path / "stargen_3_w0.sgf")
    assert isinstance(big, PhaseField) and abs(big.norm() - 1) < 1e-8


def test_count_zero(tmp_path, capsys):
    code, _, _ = run(["oscillator", "--count", 0, "--out", tmp_path], capsys)
    assert code == 0
    assert json.loads((tmp_path / "eigenvalues.json").read_text())["eigenvalues"] == []
    assert (tmp_path / "residuals.csv").read_text() == "j,k_window,lambda,residual\n"


def test_config_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "grid": {"x_min": -8, "x_max": 8, "n_points": 256},
        "hamiltonian": {"kind": "kinetic-plus-potential", "potential": "x**4"},
        "windows": [0, 1], "count": 3, "output_dir": str(tmp_path / "a")}))
    code, _, _ = run(["solve", "--config", cfg, "--count", 2], capsys)
    assert code == 0
    data = json.loads((tmp_path / "a" / "eigenvalues.json").read_text())
    assert len(data["eigenvalues"]) == 2
    assert abs(data["eigenvalues"][0] - 0.667986259155777) < 1e-6
    assert (tmp_path / "a" / "stargen_1_w1.sgf").exists()


def test_quadratic_config(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"hamiltonian": {"kind": "quadratic-1d",
                                               "coefficients": [[2, 0, 1.0], [0, 2, 0.25]]},
                               "count": 2, "grid": {"x_min": -10, "x_max": 10, "n_points": 256}}))
    code, _, _ = run(["solve", "--config", cfg, "--out", tmp_path], capsys)
    assert code == 0
    vals = json.loads((tmp_path / "eigenvalues.json").read_text())["eigenvalues"]
    # x^2 + p^2/4 has frequency 1
    assert vals == pytest.approx([0.5, 1.5], abs=1e-8)


def test_window_file(tmp_path, capsys):
    grid = SpatialGrid(-10.0, 10.0, 256)
    write_field(tmp_path / "phi.sgf", hermite_function(2, grid))
    code, _, _ = run(["oscillator", "--grid=-10:10:256", "--count", 1,
                      "--window", tmp_path / "phi.sgf", "--out", tmp_path / "o"], capsys)
    assert code == 0
    assert list((tmp_path / "o").glob("stargen_0_wcustom*.sgf"))
    write_field(tmp_path / "bad.sgf", hermite_function(2, SpatialGrid(-10.0, 10.0, 128)))
    code, _, err = run(["oscillator", "--grid=-10:10:256", "--count", 1,
                        "--window", tmp_path / "bad.sgf", "--out", tmp_path / "o"], capsys)
    assert code == 3
    single_error_line(err)


@pytest.mark.parametrize("content", ["{not json", json.dumps({"count": -1}),
                                     json.dumps({"colour": "red"}),
                                     json.dumps({"grid": {"x_min": 0, "x_max": 1}})])
def test_bad_configs(tmp_path, capsys, content):
    cfg = tmp_path / "bad.json"
    cfg.write_text(content)
    code, _, err = run(["oscillator", "--config", cfg, "--out", tmp_path], capsys)
    assert code == 2
    single_error_line(err)


def test_usage_errors(tmp_path, capsys):
    for argv in (["frobnicate"], ["oscillator", "--grid", "abc"], ["oscillator", "--count", 1000,
                                                                    "--grid=-5:5:64", "--out", tmp_path],
                 ["oscillator", "--grid=5:-5:64"], ["verify", "bogus"], []):
        code, _, err = run(argv, capsys)
        assert code == 2, argv
        single_error_line(err)


def test_star_command(tmp_path, capsys, grid64):
    x, p = x_symbol().sample(grid64), p_symbol().sample(grid64)
    write_field(tmp_path / "x.sgf", x)
    write_field(tmp_path / "p.sgf", p)
    code, out, _ = run(["star", tmp_path / "x.sgf", tmp_path / "p.sgf", tmp_path / "xp.sgf", "--verify"], capsys)
    assert code == 0
    assert out.startswith("norm ") and "PASS" in out
    assert isinstance(read_field(tmp_path / "xp.sgf"), PhaseField)


def test_star_with_unit(tmp_path, capsys, grid64):
    b = PhaseField.from_function(grid64, lambda x, p: np.exp(-(x * x + p * p) / 2) * (1 + 1j * x))
    write_field(tmp_path / "one.sgf", PhaseField.constant(grid64, 1.0))
    write_field(tmp_path / "b.sgf", b)
    code, _, _ = run(["star", tmp_path / "one.sgf", tmp_path / "b.sgf", tmp_path / "out.sgf"], capsys)
    assert code == 0
    assert (read_field(tmp_path / "out.sgf") - b).max_abs() < 1e-10


def test_star_verify_failure(tmp_path, capsys, grid64):
    g = PhaseField.from_function(grid64, lambda x, p: np.exp(-(x * x + p * p)))
    write_field(tmp_path / "g.sgf", g)
    code, out, err = run(["star", tmp_path / "g.sgf", tmp_path / "g.sgf", tmp_path / "o.sgf", "--verify"], capsys)
    assert code == 4 and "FAIL" in out
    single_error_line(err)


def test_star_grid_mismatch(tmp_path, capsys, grid64, grid128):
    write_field(tmp_path / "a.sgf", PhaseField.constant(grid64, 1.0))
    write_field(tmp_path / "b.sgf", PhaseField.constant(grid128, 1.0))
    code, _, err = run(["star", tmp_path / "a.sgf", tmp_path / "b.sgf", tmp_path / "o.sgf"], capsys)
    assert code == 3
    single_error_line(err)
    code, _, err = run(["star", tmp_path / "a.sgf", tmp_path / "missing.sgf", tmp_path / "o.sgf"], capsys)
    assert code == 2
    single_error_line(err)


def test_wigner_command(tmp_path, capsys):
    code, out, _ = run(["wigner", "--grid=-8:8:64", "--state", 1, "--window", 0, "--window", 1,
                        "--out", tmp_path], capsys)
    assert code == 0
    w = read_field(tmp_path / "wigner_w1.sgf")
    assert abs(w.norm() - 1) < 1e-8
    psi_path = tmp_path / "psi.sgf"
    write_field(psi_path, hermite_function(0, SpatialGrid(-8.0, 8.0, 64)))
    code, _, _ = run(["wigner", "--psi", psi_path, "--out", tmp_path / "b"], capsys)
    assert code == 0 and (tmp_path / "b" / "wigner_w0.sgf").exists()


def test_williamson_command(tmp_path, capsys):
    code, out, _ = run(["williamson", "[[1,0,0,0],[0,2,0,0],[0,0,1,0],[0,0,0,2]]",
                        "--levels", "0,0", "1,0"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["omegas"] == pytest.approx([1.0, 2.0])
    assert data["levels"] == pytest.approx([1.5, 2.5])
    code, _, err = run(["williamson", "[[1,0],[0,-1]]"], capsys)
    assert code == 2
    single_error_line(err)


def test_verify_command(capsys):
    code, out, _ = run(["verify", "fourier"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert all(l.startswith("PASS") for l in lines[:-1])
    assert any("involution" in l for l in lines)


def test_deterministic_outputs(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["oscillator", "--grid=-8:8:128", "--count", 4, "--window", 0, "--window", 2,
                    "--out", tmp_path / d], capsys)[0] == 0
    for name in ("eigenvalues.json", "residuals.csv", "psi_2.sgf", "stargen_3_w2.sgf"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_thread_cap(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("STARGEN_THREADS", "1")
    assert run(["oscillator", "--grid=-8:8:128", "--count", 2, "--out", tmp_path], capsys)[0] == 0
    monkeypatch.setenv("STARGEN_THREADS", "zero")
    code, _, err = run(["oscillator", "--out", tmp_path], capsys)
    assert code == 2
    single_error_line(err)


def test_console_script(tmp_path):
    env = dict(os.environ, STARGEN_THREADS="2")
    proc = subprocess.run([sys.executable, "-m", "stargen.cli", "verify", "nothing"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 2
    assert proc.stderr.startswith("error: unknown suite")
