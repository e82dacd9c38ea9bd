import json
import subprocess
import sys

import pytest

from kyle_eq.cli import main
from kyle_eq.sweep import Axis, SweepConfig, run_sweep, rows_to_csv, sweep_columns
from kyle_eq.svg import contour_svg, line_svg


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_pure_unwinder(capsys):
    code, out, _ = run_cli(capsys, "solve", "--j2", "1", "--theta-1plus", "1",
                           "--theta-eps", "0", "--theta-2", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["regime"] == "pure"
    assert doc["profile"]["theta_z"] == 0.0
    assert doc["profile"]["beta12"] > 0.0


def test_solve_reports_no_equilibrium_exit_code(capsys):
    code, out, _ = run_cli(capsys, "solve", "--j1", "1", "--j2", "9",
                           "--theta-1plus", "0.02", "--theta-eps", "0")
    assert code == 3
    doc = json.loads(out)
    assert doc["regime"] == "none"


def test_limit_json(capsys):
    code, out, _ = run_cli(capsys, "limit", "--small-it", "--j", "2",
                           "--theta-eps", "0", "--theta-2", "1",
                           "--regime", "mixed")
    assert code == 0
    doc = json.loads(out)
    assert doc["a1"] == pytest.approx(0.6, abs=1e-12)
    assert doc["theta_z"] == pytest.approx(0.14, abs=1e-12)


def test_unknown_subcommand_usage_error():
    assert main(["frobnicate"]) == 2


def test_sweep_grid_shape_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["sweep", "--j1", "1", "--theta-2", "1",
            "--axis1", "theta_eps:0:1:3",
            "--axis2", "theta_1plus:0.5:1:3",
            "--out"]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().strip().split("\n")
    assert len(lines) == 10  # header + 3x3


def test_sweep_unwritable_path_io_error(capsys):
    code = main(["sweep", "--j1", "1", "--axis1", "theta_eps:0:1:2",
                 "--out", "/nonexistent-dir/x.csv"])
    assert code == 4


def test_config_file_with_flag_override(tmp_path, capsys):
    ini = tmp_path / "cfg.ini"
    ini.write_text("[market]\nj2 = 1\ntheta_1plus = 1.0\ntheta_eps = 0.5\n")
    code, out, _ = run_cli(capsys, "solve", "--config", str(ini),
                           "--theta-eps", "0.0")
    assert code == 0
    doc = json.loads(out)
    assert doc["params"]["j2"] == 1
    assert doc["params"]["theta_eps"] == 0.0  # flag wins


def test_verify_roundtrip(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "solve", "--j1", "1", "--theta-1plus", "1",
                           "--theta-eps", "0")
    sol_path = tmp_path / "sol.json"
    sol_path.write_text(out)
    code, out, _ = run_cli(capsys, "verify", "--input", str(sol_path),
                           "--n", "100000", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True


def test_svg_line_and_determinism():
    rows = [{"x": 0.0, "a": 1.0, "b": 2.0},
            {"x": 1.0, "a": 1.5, "b": 1.0}]
    s1 = line_svg(rows, "x", ["a", "b"], title="t")
    s2 = line_svg(rows, "x", ["a", "b"], title="t")
    assert s1 == s2
    assert s1.startswith('<?xml version="1.0"')
    assert "<polyline" in s1 and s1.count("<polyline") >= 2


def test_svg_empty_body_axes_only(tmp_path, capsys):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text("x,y\n")
    out = tmp_path / "empty.svg"
    code = main(["plot", "--csv", str(csv_path), "--x", "x", "--y", "y",
                 "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "<svg" in text and "<polyline" not in text


def test_svg_missing_column_spec_error(tmp_path):
    csv_path = tmp_path / "d.csv"
    csv_path.write_text("x,y\n0,1\n1,2\n")
    out = tmp_path / "d.svg"
    code = main(["plot", "--csv", str(csv_path), "--x", "x", "--y", "nope",
                 "--out", str(out)])
    assert code == 2


def test_svg_contour():
    rows = []
    for x in (0.0, 0.5, 1.0):
        for y in (0.0, 1.0):
            rows.append({"sx": x, "sy": y, "z": x + y})
    text = contour_svg(rows, "sx", "sy", "z")
    assert text.count("<rect") >= 6


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "kyle_eq.cli", "figure", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fig19" in proc.stdout
