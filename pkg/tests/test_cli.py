import json
import math
import subprocess
import sys

import pytest

from liouville_lab.cli import main
from liouville_lab.csvio import read_csv
from liouville_lab.shooting import ShootingParams, a_star, shoot


def run_cli(args, tmp_path):
    return main(["--out-dir", str(tmp_path), *args])


def test_alpha_curve_artifact(tmp_path, capsys):
    rc = run_cli(["alpha-curve", "--N", "3", "--a-min", "-1", "--a-max", "1",
                  "--step", "0.5"], tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    assert "alpha-curve N=3" in out
    cols, rows, comments = read_csv(tmp_path / "alpha_curve.csv")
    assert cols == ["N", "a", "alpha", "alpha_prime", "zero_count"]
    assert len(rows) == 5
    assert comments[0].startswith("# liouville-lab v")
    assert any("command:" in c for c in comments)
    assert all(4.0 < r[2] < 8.0 for r in rows)


def test_byte_identical_reruns(tmp_path):
    args = ["alpha-curve", "--N", "2", "--a-min", "0", "--a-max", "1", "--step", "0.5"]
    run_cli(args, tmp_path / "one")
    run_cli(args, tmp_path / "two")
    b1 = (tmp_path / "one" / "alpha_curve.csv").read_bytes()
    b2 = (tmp_path / "two" / "alpha_curve.csv").read_bytes()
    assert b1 == b2


def test_json_format(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "--format", "json",
               "count", "--N", "1", "--step", "0.5"])
    assert rc == 0
    payload = json.loads((tmp_path / "count.json").read_text())
    assert payload["rows"][0]["count"] == 1
    assert payload["command"] == "count"


def test_count_at_explicit_level(tmp_path, capsys):
    rc = run_cli(["count", "--N", "1", "--step", "0.5"], tmp_path)
    assert rc == 0
    assert "1 solutions" in capsys.readouterr().out


def test_count_with_query(tmp_path, capsys):
    rc = run_cli(["count", "--N", "3", "--alpha", "6.5", "--step", "0.25"], tmp_path)
    assert rc == 0
    cols, rows, _ = read_csv(tmp_path / "count.csv")
    row = dict(zip(cols, rows[0]))
    assert row["count"] == 1 == row["direct"]


def test_config_error_exit_code(tmp_path, capsys):
    rc = run_cli(["alpha-curve", "--N", "3", "--a-min", "2", "--a-max", "1"], tmp_path)
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError"


def test_solver_error_is_machine_readable(tmp_path, capsys):
    # alpha = 2N sits on the excluded line of the counting proposition
    rc = run_cli(["count", "--N", "3", "--alpha", "6.0", "--step", "0.5"], tmp_path)
    assert rc == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "OnTwoN"
    assert err["command"] == "count"


def test_unknown_flag_rejected(tmp_path):
    with pytest.raises(SystemExit) as info:
        run_cli(["alpha-curve", "--N", "3", "--bogus", "1"], tmp_path)
    assert info.value.code == 2


def test_entry_point_installed():
    proc = subprocess.run([sys.executable, "-m", "liouville_lab.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "liouville-lab" in proc.stdout


def test_profile_csv_roundtrip(tmp_path):
    p = shoot(ShootingParams(4.0, a_star(4.0)))
    path = tmp_path / "profile.csv"
    p.to_csv(path)
    cols, rows, comments = read_csv(path)
    assert cols == ["t", "r", "u", "u_prime", "flux"]
    header = " ".join(comments)
    assert "alpha=" in header and "N=4.0" in header
    # flux column consistent with -r u'
    t, r, u, up, flux = rows[len(rows) // 2]
    assert math.isclose(flux, -r * up, rel_tol=1e-12)
    assert math.isclose(r, math.exp(t), rel_tol=1e-12)
