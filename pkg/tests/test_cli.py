import json
import math
import os

import pytest

from catbitflip.cli import main
from catbitflip.config import RunConfig
from catbitflip.errors import ConfigError
from catbitflip.sweep import COLUMNS, compute_row, early_time_fit, leakage_trajectory, run_rate, run_sweep, worker_count
from catbitflip.liouville import PerturbationSpec

HEADER = "alpha2,gamma_analytic_first,gamma_analytic_second,gamma_analytic_total,gamma_spectral,overlap_score,dim_used,reliability_flag"


def cfg(**kw):
    base = dict(perturbation={"kind": "photon_loss", "strength": 0.01}, alpha2_grid=[1.0], methods=["analytic"])
    base.update(kw)
    return RunConfig(**base)


def test_config_round_trip():
    c = RunConfig.load(os.path.join(os.path.dirname(__file__), "..", "configs", "fig1.json"))
    assert c.alpha2_grid[0] == 0.5 and c.alpha2_grid[-1] == 6.0 and len(c.alpha2_grid) == 12
    again = RunConfig.from_json(c.to_json())
    assert again.to_dict() == c.to_dict()
    assert RunConfig.from_json(again.to_json()).to_json() == c.to_json()


@pytest.mark.parametrize("bad", [
    dict(alpha2_grid=[]),
    dict(alpha2_grid=[2.0, 1.0]),
    dict(alpha2_grid=[0.01]),
    dict(methods=["magic"]),
    dict(format="xml"),
    dict(perturbation={"kind": "photon_loss", "strength": -1.0}),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        cfg(**bad)


def test_rate_examples():
    row = run_rate(cfg(alpha2_grid=[4.0]))
    # closed form; 4.501e-9 + 1.982e-8
    assert row.gamma_analytic_total == pytest.approx(2.4318671466630969e-08, rel=1e-10)
    row = run_rate(cfg(perturbation={"kind": "detuning", "strength": 0.1}))
    assert row.gamma_analytic_total == pytest.approx(1.257705e-3, rel=1e-6)
    row = run_rate(cfg(perturbation={"kind": "zgate", "strength": 0.0}, alpha2_grid=[2.0], methods=["analytic", "spectral"]))
    assert row.gamma_analytic_total <= 1e-15
    # dense eigensolver noise on an exactly zero rate is ~1e-13; the row says so
    assert row.gamma_spectral <= 1e-12 and row.reliability_flag == "floor"


def test_row_eigensum_and_spectral():
    row = compute_row(cfg(methods=["analytic", "eigensum", "spectral"]), 1.0)
    assert row.reliability_flag == "ok"
    assert row.gamma_spectral == pytest.approx(row.gamma_analytic_total, rel=0.01)
    assert row.dim_used >= 20 and 0 < row.overlap_score <= 1


def test_sweep_csv_is_deterministic(tmp_path):
    out = tmp_path / "s.csv"
    c = cfg(alpha2_grid=[0.5, 1.0, 1.5], methods=["analytic", "spectral"], output_path=str(out))
    run_sweep(c, workers=1)
    first = out.read_text()
    run_sweep(c, workers=2)
    assert out.read_text() == first
    lines = first.splitlines()
    assert lines[0] == HEADER and tuple(lines[0].split(",")) == COLUMNS
    assert [float(l.split(",")[0]) for l in lines[1:]] == [0.5, 1.0, 1.5]
    # floats are written with %.17g, which round-trips doubles exactly
    for line in lines[1:]:
        for field in line.split(",")[1:6]:
            assert field == f"{float(field):.17g}"
    assert float(lines[2].split(",")[1]) == 1.865736036377405e-4


def test_worker_env(monkeypatch):
    monkeypatch.setenv("CATBITFLIP_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("CATBITFLIP_WORKERS", "zero")
    with pytest.raises(ConfigError):
        worker_count()
    monkeypatch.delenv("CATBITFLIP_WORKERS")
    assert worker_count() == os.cpu_count()


def test_leakage_probe():
    import numpy as np

    t = np.linspace(0.0, 4e-4, 5)
    l = leakage_trajectory(PerturbationSpec("photon_gain", 0.01), 2.0, t)
    slope, _ = early_time_fit(t, l)
    assert slope == pytest.approx(0.01, rel=0.05)
    assert np.max(np.abs(leakage_trajectory(None, 2.0, [0.0, 1.0, 2.0]))) <= 1e-10


def test_cli_exit_codes(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["rate", "--kind", "photon_loss", "--kappa1", "0.01", "--alpha2", "1", "--method", "analytic",
                 "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data[0]["gamma_analytic_first"] == pytest.approx(1.865736036377405e-4)
    capsys.readouterr()

    assert main(["sweep", "--kind", "photon_loss", "--alpha2", "2", "1"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["code"] == 2 and "increasing" in err["message"] and "context" in err

    assert main(["rate", "--kind", "photon_loss", "--alpha2", "4", "--dim", "10", "--method", "spectral"]) == 3
    assert json.loads(capsys.readouterr().err)["code"] == 3

    assert main(["bogus"]) == 2
    assert json.loads(capsys.readouterr().err)["code"] == 2


def test_cli_flags_override_config(tmp_path, capsys):
    out = tmp_path / "s.csv"
    fig = os.path.join(os.path.dirname(__file__), "..", "configs", "fig3.json")
    assert main(["sweep", "--config", fig, "--alpha2", "1", "--method", "analytic", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert float(lines[1].split(",")[3]) == pytest.approx(1.257705e-3, rel=1e-6)
    assert lines[1].split(",")[4] == ""  # spectral not requested


def test_cli_leakage(tmp_path):
    out = tmp_path / "l.csv"
    assert main(["leakage", "--kind", "photon_gain", "--strength", "0.01", "--alpha2", "2",
                 "--t-max", "0.001", "--n-times", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,leakage" and len(lines) == 4
