import csv
import io
import json
import subprocess
import sys

import pytest

from uavmmw import cli
from uavmmw.config import RunConfig, parse_ini

FAST = ["--samples", "60000", "--set", "simulation.batch_size=20000"]
COARSE_MODEL = ["--set", "tx.sigma_deg=3", "--set", "rx.sigma_deg=3", "--set", "tx.offset_x_deg=1",
                "--set", "tx.offset_y_deg=1", "--set", "tx.n=7", "--set", "rx.n=7",
                "--d-param", "3", "--lobes", "1"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    meta = [line for line in text.splitlines() if line.startswith("#")]
    body = [line for line in text.splitlines() if line and not line.startswith("#")]
    return meta, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_pattern_csv(tmp_path, capsys):
    out = tmp_path / "pattern.csv"
    code, _, _ = run(["pattern", "--out", str(out), "--set", "pattern.points=11"], capsys)
    assert code == 0
    meta, rows = parse_csv(out.read_text())
    assert any(m.startswith("# config_sha256: ") for m in meta)
    assert "# seed: 0" in meta
    assert {r["model"] for r in rows} == {"actual", "approximate", "sectorized"}
    assert len(rows) == 3 * 3 * 11
    _, sectors = parse_csv((tmp_path / "pattern.csv.sectors.csv").read_text())
    assert len(sectors) == 50
    assert list(sectors[0]) == ["sector_index", "upper_angle_deg", "gain_linear", "gain_dbi"]


def test_pattern_single_element_is_flat_array(capsys):
    code, out, _ = run(["pattern", "--set", "tx.n=1", "--set", "pattern.points=5",
                        "--set", "pattern.theta_y_deg=0"], capsys)
    assert code == 0
    _, rows = parse_csv(out.split("\n\n")[0])
    actual = [r for r in rows if r["model"] == "actual"]
    # N = 1: the element pattern alone, peak G_max + 10 log10 G_0(1)
    assert float(actual[2]["gain_dbi"]) == pytest.approx(8.0 + 1.8255, abs=1e-3)


def test_distribution_per_d(capsys):
    code, out, _ = run(["distribution", "--set", "distribution.d_values=5,15,25",
                        "--set", "distribution.points=401"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert {r["d_param"] for r in rows} == {"5", "15", "25"}
    cdf = [float(r["cdf"]) for r in rows if r["d_param"] == "25"]
    assert all(b >= a for a, b in zip(cdf, cdf[1:]))


def test_outage_sweep_and_empty_sweep(capsys):
    code, out, _ = run(["outage", "--set", "outage.step=10"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 3 * 5
    assert rows[0]["series"] == "n=6" and rows[0]["sweep_variable"] == "tx_power_dbm"
    code, _, err = run(["outage", "--set", "outage.stop=-5"], capsys)
    assert code == 1 and "empty" in err


def test_outage_link_type_series(capsys):
    code, out, _ = run(["outage", "--set", "outage.series_variable=link_type",
                        "--set", "outage.series=A2A,G2A", "--set", "outage.variable=distance_m",
                        "--set", "outage.start=500", "--set", "outage.stop=3000",
                        "--set", "outage.step=500"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert {r["series"] for r in rows} == {"link_type=A2A", "link_type=G2A"}


def test_validate_pass_report(capsys):
    code, out, _ = run(["validate"] + FAST, capsys)
    report = json.loads(out)
    assert code == 0 and report["status"] == "PASS"
    assert report["n"] == 60000 and report["seed"] == 0
    assert report["cdf"]["max_rel_error"] <= 0.15


def test_validate_coarse_model_fails_with_exit_3(capsys):
    code, out, err = run(["validate"] + FAST + COARSE_MODEL, capsys)
    assert code == 3
    assert json.loads(out)["status"] == "FAIL"
    assert "ValidationFailure" in err


def test_validate_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / f"r{i}.json" for i in range(3)]
    for path, workers in zip(paths, ("1", "1", "4")):
        assert cli.main(["validate", "--out", str(path), "--workers", workers] + FAST) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes() == paths[2].read_bytes()


def test_optimize_outputs(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    summary = tmp_path / "best.json"
    code, _, _ = run(["optimize", "--out", str(out), "--summary-out", str(summary),
                      "--set", "optimize.n_max=6"], capsys)
    assert code == 0
    meta, rows = parse_csv(out.read_text())
    assert len(rows) == 36
    best = json.loads(summary.read_text())
    assert best["best_nt"] == best["best_nr"]
    assert any(m.startswith("# best: ") for m in meta)
    assert "elapsed_seconds" not in best


def test_flags_override_config(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[simulation]\nseed = 5\n[model]\nlobes = 2\n")
    echo = tmp_path / "echo.ini"
    code, _, _ = run(["outage", "--config", str(ini), "--seed", "9", "--lobes", "1",
                      "--sector0", "paper", "--echo-config", str(echo),
                      "--set", "outage.step=40"], capsys)
    assert code == 0
    cfg = parse_ini(echo.read_text())
    assert (cfg.simulation.seed, cfg.model.lobes, cfg.model.sector0) == (9, 1, "paper")
    assert parse_ini(cfg.to_ini()) == cfg


@pytest.mark.parametrize("argv, code", [
    (["frobnicate"], 1),
    (["outage", "--lobes", "3"], 1),
    (["outage", "--set", "link.unknown=1"], 1),
    (["outage", "--set", "link.distance_m=-5"], 2),
    (["outage", "--set", "link.nakagami_m=0.1"], 2),
    (["outage", "--out", "/nonexistent-dir/x.csv", "--set", "outage.step=40"], 4),
    (["outage", "--config", "/nonexistent-dir/c.ini"], 4),
])
def test_exit_codes(argv, code, capsys):
    assert cli.main(argv) == code
    if code == 4:
        assert "/nonexistent-dir/" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "uavmmw", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "uavmmw" in res.stdout


def test_rerun_outputs_identical(capsys):
    outs = []
    for _ in range(2):
        cli.main(["distribution", "--set", "distribution.points=50"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert RunConfig().with_value("distribution", "points", 50).digest() in outs[0]
