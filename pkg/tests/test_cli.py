import json
import subprocess
import sys

import pytest

from slopelab.cli import main
from slopelab.construct import ConstructionCertificate
from slopelab.dynamics import CSV_HEADER

FAST = ["--set", "resolution=600", "--set", "tail_length=32"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--u", "1,2,3", "--v", "1,2", "--w", "1,3",
                       "--v-unbounded", "--w-unbounded")
    assert code == 0
    report = json.loads(out)
    assert report["valid"] and report["stage_count"] == 2 and report["classification"] == "Parabolic"


def test_validate_non_monotone(capsys):
    code, _, err = run(capsys, "validate", "--u", "2,1", "--v", "1", "--w", "1")
    assert code == 3
    assert "NonMonotoneU" in err


def test_validate_params_file(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"u": [1, 2], "v": [1], "w": [2]}))
    assert run(capsys, "validate", "--params", str(path))[0] == 0
    path.write_text(json.dumps({"u": [1, 2]}))
    assert run(capsys, "validate", "--params", str(path))[0] == 3


def test_usage_errors(capsys):
    for argv in ([], ["bogus"], ["construct", "--stages", "two"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_bad_config_is_validation_error(capsys, tmp_path):
    assert run(capsys, "validate", "--u", "1", "--set", "nope=1")[0] == 3
    assert run(capsys, "validate", "--u", "1", "--config", str(tmp_path / "missing.json"))[0] == 3


def test_map_test_default_config(capsys, tmp_path):
    code, out, _ = run(capsys, "map-test", "--output-dir", str(tmp_path))
    assert code == 0
    rows = json.loads((tmp_path / "map_test.json").read_text())
    assert len(rows) >= 3
    assert all(r["passed"] and r["residual"] <= r["tolerance"] for r in rows)
    assert "residual" in out


def test_trajectory_outputs(capsys, tmp_path):
    code, _, _ = run(capsys, "trajectory", "--u", "1,2", "--v", "1", "--w", "3",
                     "--z0", "0.1+0.1j", "--output-dir", str(tmp_path), *FAST)
    assert code == 0
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) > 10
    assert (tmp_path / "trajectory.json").exists()
    assert (tmp_path / "domain.svg").read_text().lstrip().startswith("<?xml")


def test_trajectory_outside_disk(capsys, tmp_path):
    code, _, err = run(capsys, "trajectory", "--u", "1", "--z0", "2", "--output-dir", str(tmp_path), *FAST)
    assert code == 3 and "OutsideDisk" in err


def test_slope_report(capsys, tmp_path):
    code, out, _ = run(capsys, "slope", "--u", "1,2,3,5", "--v", "1,3,3", "--w", "1,3,3",
                       "--output-dir", str(tmp_path), *FAST)
    assert code == 0
    iv = json.loads((tmp_path / "slope.json").read_text())["slope_interval"]
    assert abs(iv["lo"]) < 1e-3 and abs(iv["hi"]) < 1e-3


def test_numerical_failure_exit_status(capsys, tmp_path):
    code, _, err = run(capsys, "construct", "--eps", "0.01,0.01", "--set", "search.cap_factor=2",
                       "--output-dir", str(tmp_path))
    assert code == 4 and "StageFailed" in err


def test_construct_verify_plot(capsys, tmp_path):
    code, _, _ = run(capsys, "construct", "--stages", "2", "--output-dir", str(tmp_path))
    assert code == 0
    cert = ConstructionCertificate.load(tmp_path / "certificate.json")
    assert len(cert.stages) == 2
    code, out, _ = run(capsys, "verify", "--strictness", "2", "--output-dir", str(tmp_path))
    assert code == 0 and "verification passed" in out
    assert json.loads((tmp_path / "verification.json").read_text())["passed"]
    code, _, _ = run(capsys, "plot", "--certificate", str(tmp_path / "certificate.json"),
                     "--output-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "domain.svg").exists() and (tmp_path / "slope.svg").exists()

    # moving a witness out of its room makes verification fail
    data = json.loads((tmp_path / "certificate.json").read_text())
    s = data["stages"][0]
    s["xi_n"] = s["u_n"] + s["M_n"] + 1
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--certificate", str(bad), "--output-dir", str(tmp_path),
                       "--set", "search.resolution=300")
    assert code == 5 and "FAILED" in out


def test_svg_has_no_timestamp(capsys, tmp_path):
    for sub in ("a", "b"):
        run(capsys, "plot", "--u", "1,2", "--v", "1", "--w", "1", "--output-dir", str(tmp_path / sub), *FAST)
    a = (tmp_path / "a" / "slope.svg").read_bytes()
    assert a == (tmp_path / "b" / "slope.svg").read_bytes()
    assert b"<dc:date>" not in a


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "slopelab.cli", "validate", "--u", "2,1", "--v", "1", "--w", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
