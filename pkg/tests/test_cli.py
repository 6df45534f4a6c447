import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dirlab import cli, disk

FAST = ["--radial", "96", "--angular", "512", "--grid", "256"]


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_constant_json(capsys):
    code, out, _ = run(["constant", "--psi", "power:1", "--domain", "nonneg"], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(4 / 3)


def test_ratio_csv(capsys):
    code, out, _ = run(["ratio", "--psi", "power:1", "--a", "0", "--b", "1", "--format", "csv"], capsys)
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["ratio"]) == pytest.approx(4 / 3)


def test_energy_spot_value(capsys):
    code, out, _ = run(["energy", "--psi", "power:1@nonneg", "--h", "trig:1;1,0", *FAST], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["lhs"] == pytest.approx(5 * math.pi / 4)
    assert data["ratio"] == pytest.approx(10 / 9)
    assert data["C"] is None


def test_verify_pass_and_fail_exit_codes(capsys):
    code, out, _ = run(["verify", "--psi", "power:1", "--h", "cos:2", "--format", "csv", *FAST], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(cli.ENERGY_COLUMNS)
    assert rows[0]["pass"] == "True"
    code, _, _ = run(["verify", "--psi", "power:1", "--h", "cos:2", "--C", "1.0", *FAST], capsys)
    assert code == 1


def test_verify_random_corpus(capsys, tmp_path):
    out_file = tmp_path / "rows.csv"
    code, _, _ = run(["verify", "--psi", "power:2", "--random", "3", "--seed", "4",
                      "--format", "csv", "-o", str(out_file), *FAST], capsys)
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert len(rows) == 3 and all(r["pass"] == "True" for r in rows)


def test_verify_numerical_failure_exit_code(capsys):
    code, _, err = run(["verify", "--psi", "power:3", "--random", "1", "--seed", "5",
                        "--radial", "3", "--angular", "256", "--grid", "256"], capsys)
    assert code == 2
    assert "disagree" in err


def test_boundary_file(capsys, tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("\n".join(repr(float(v)) for v in np.cos(disk.nodes(256))))
    code, out, _ = run(["energy", "--psi", "const:1", "--h", f"csv:{path}", *FAST], capsys)
    assert code == 0
    assert json.loads(out)["lhs"] == pytest.approx(math.pi)


def test_stepramp_boundary(capsys):
    code, out, _ = run(["energy", "--psi", "const:1", "--h", "stepramp:a=0,b=1,eps=0.5",
                        "--radial", "64", "--angular", "1024", "--grid", "1024"], capsys)
    assert code == 0
    data = json.loads(out)
    # ramps are not band-limited, so only the boundary route sees exactly the same samples
    assert data["lhs_boundary"] == pytest.approx(data["rhs"], rel=1e-12)
    assert data["ratio"] == pytest.approx(1.0, rel=1e-4)


def test_extremal_outputs_sweep_and_summary(capsys):
    code, out, _ = run(["extremal", "--psi", "power:1", "--a", "0", "--b", "1",
                        "--eps-from", "0.4", "--eps-to", "0.05", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",") == list(cli.extremal.ExtremalSweepRow.CSV_COLUMNS)
    assert len(lines) == 1 + 4 + 1
    summary = json.loads(lines[-1].lstrip("# "))
    assert summary["target_constant"] == pytest.approx(4 / 3)
    assert set(summary) >= {"intercept", "residual", "target_constant"}


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["constant"],
    ["constant", "--psi", "power:-1"],
    ["constant", "--psi", "power:1", "--domain", "upper"],
    ["energy", "--psi", "power:1", "--h", "tri:1"],
    ["energy", "--psi", "power:1", "--h", "cos:1", "--grid", "100"],
    ["energy", "--psi", "power:1", "--h", "csv:/nonexistent.csv"],
    ["verify", "--psi", "power:1"],
    ["verify", "--psi", "power:1", "--h", "cos:1", "--C", "big"],
    ["extremal", "--psi", "power:1", "--a", "0", "--b", "1", "--arc", "nope"],
    ["extremal", "--psi", "power:1", "--a", "0", "--b", "1", "--eps-to", "1", "--eps-from", "0.1"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 64
    assert "usage error" in err


def test_parse_args_builds_config():
    cfg = cli.parse_args(["verify", "--psi", "power:0.5", "--h", "cos:1", "--C", "2",
                          "--radial", "10", "--angular", "64", "--grid", "128"])
    assert cfg.command == "verify" and cfg.constant == "2"
    assert cfg.resolution.radial_points == 10 and cfg.resolution.boundary_grid == 128


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "dirlab.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "CSV columns" in res.stdout
