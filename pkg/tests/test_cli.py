import csv
import json
import subprocess
import sys

import pytest

from dmp_volatility.cli import EXIT_DATA, EXIT_OK, main
from dmp_volatility.data_io import write_combined_csv
from synthetic import TRUE, synthetic_panel, write_fred_dir


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def fred_dir(tmp_path_factory):
    _, fred, _ = synthetic_panel()
    return write_fred_dir(fred, tmp_path_factory.mktemp("fred"))


@pytest.fixture(scope="module")
def combined(tmp_path_factory):
    _, fred, _ = synthetic_panel()
    path = tmp_path_factory.mktemp("comb") / "combined.csv"
    write_combined_csv(fred, path)
    return path


def test_table(tmp_path, capsys):
    assert main(["table", "--out", str(tmp_path)]) == EXIT_OK
    table = rows(tmp_path / "table_model_results.csv")
    assert [r["economy"] for r in table] == ["Baseline", "MiddleH", "HighH", "Split"]
    assert float(table[0]["eta_theta_y"]) == pytest.approx(3.602, rel=5e-3)
    assert (tmp_path / "table_model_results.csv.meta.json").exists()
    assert "HighH" in capsys.readouterr().out


def test_flags_before_subcommand(tmp_path):
    assert main(["--out", str(tmp_path), "--gamma", "1.27", "table"]) == EXIT_OK
    table = rows(tmp_path / "table_model_results.csv")
    assert float(table[0]["eta_theta_y"]) != pytest.approx(3.602, rel=1e-3)


def test_sweep(tmp_path):
    assert main(["sweep", "--out", str(tmp_path)]) == EXIT_OK
    data = rows(tmp_path / "fig_ur_dynamics.csv")
    assert len(data) == 61
    mid = data[30]
    assert float(mid["y"]) == pytest.approx(1.0)
    assert float(mid["u_Baseline"]) == pytest.approx(0.0571, abs=2e-4)
    meta = json.loads((tmp_path / "fig_ur_dynamics.csv.meta.json").read_text())
    assert meta["columns"]["u_Baseline"]


def test_bounds_calibrate_solve(tmp_path):
    for cmd in ("bounds", "calibrate", "solve"):
        assert main([cmd, "--out", str(tmp_path)]) == EXIT_OK
    assert rows(tmp_path / "fig_bound_indexed_y.csv")
    cal = json.loads((tmp_path / "calibration.json").read_text())
    assert "h_max" in json.dumps(cal)
    assert rows(tmp_path / "fig_w_tight.csv")


def test_missing_config_exit_code(tmp_path):
    assert main(["table", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_DATA


def test_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"targets": {"bogus": 1}}')
    assert main(["table", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_DATA
    broken = tmp_path / "broken.json"
    broken.write_text('{"gamma": ')
    assert main(["table", "--config", str(broken), "--out", str(tmp_path)]) == EXIT_DATA


def test_adjust_and_estimate_fred_dir(tmp_path, fred_dir):
    args = ["--offline", "--data", str(fred_dir), "--out", str(tmp_path)]
    assert main(["adjust", *args]) == EXIT_OK
    flows = rows(tmp_path / "flows_adjusted.csv")
    assert len(flows) == 270
    assert all(not r["flag"] for r in flows)
    assert float(flows[0]["s_corrected"]) == pytest.approx(0.035, abs=1e-9)
    assert main(["estimate", *args]) == EXIT_OK
    est = json.loads((tmp_path / "estimation.json").read_text())
    assert est["gamma"] == pytest.approx(TRUE["gamma"], abs=1e-6)
    assert est["psi"] == pytest.approx(TRUE["psi"], abs=1e-6)
    for name in ("fig_estimated_find", "fig_tight_vs_find", "fig_tight_vs_lfind", "fig_elasticity_matching",
                 "fig_bound", "fig_bound_hi", "fig_bound_tightness"):
        assert (tmp_path / f"{name}.csv").exists()
        assert (tmp_path / f"{name}.csv.meta.json").exists()


def test_estimate_combined_csv_variants(tmp_path, combined):
    base = ["estimate", "--offline", "--data", str(combined), "--out", str(tmp_path)]
    assert main(base + ["--gamma-fixed", "1.27"]) == EXIT_OK
    est = json.loads((tmp_path / "estimation.json").read_text())
    assert est["gamma"] == 1.27 and est["gamma_fixed"]
    assert main(base + ["--no-dummies"]) == EXIT_OK
    est = json.loads((tmp_path / "estimation.json").read_text())
    assert est["psi"] == 0.0 and not est["dummies"]


def test_offline_without_data(tmp_path):
    assert main(["adjust", "--offline", "--data", str(tmp_path / "empty"), "--out", str(tmp_path)]) == EXIT_DATA


def test_range_errors(tmp_path, combined):
    base = ["adjust", "--offline", "--data", str(combined), "--out", str(tmp_path)]
    assert main(base + ["--range", "2010-05:2010-01"]) == EXIT_DATA
    assert main(base + ["--range", "1990-01:1991-01"]) == EXIT_DATA
    assert main(base + ["--range", "garbage"]) == EXIT_DATA


def test_deterministic_outputs(tmp_path, combined):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["estimate", "--offline", "--data", str(combined), "--out", str(d)]) == EXIT_OK
        assert main(["table", "--out", str(d)]) == EXIT_OK
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dmp_volatility", "calibrate", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "dmp_volatility", "--help"], capture_output=True, text=True)
    assert "estimate" in proc.stdout
