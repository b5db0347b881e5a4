import csv
import json
import shutil
import subprocess

import numpy as np
import pytest

from bimodal import cli, model, spectra
from bimodal.model import THZ


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


@pytest.fixture
def run_cfg(tmp_path):
    return write_json(tmp_path / "run.json", {"antenna": {"table1_delta_l_nm": 0},
                                              "emitter": {"pump_per_s": 1e9, "theta_deg": 90}})


@pytest.fixture
def spectra_files(tmp_path):
    paths = {}
    for ch in spectra.CHANNELS:
        paths[ch] = tmp_path / f"{ch}.csv"
        assert cli.main(["synth", "--table1", "93", "--channel", ch, "--out", str(paths[ch])]) == 0
    return paths


def test_fit_round_trip(tmp_path, spectra_files):
    out = tmp_path / "char.json"
    code = cli.main(["fit", "--scat", str(spectra_files["scat"]), "--abs", str(spectra_files["abs"]),
                     "--purcell-f", "1200", "900", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    ant = model.table1_antenna(93)
    for got, ref in zip(doc["modes"], ant.modes):
        assert got["omega_thz_over_2pi"] == pytest.approx(ref.omega / THZ, rel=1e-4)
        assert got["gamma_scat_thz_over_2pi"] == pytest.approx(ref.gamma_scat / THZ, rel=1e-3)
        assert got["gamma_abs_thz_over_2pi"] == pytest.approx(ref.gamma_abs / THZ, rel=1e-3)
    assert doc["source"]["converged"] is True
    # the characterization feeds the solver directly
    run = write_json(tmp_path / "run2.json", {"antenna": "char.json", "outputs": ["rate", "e_n"]})
    assert cli.main(["solve", "--config", str(run), "--truncation", "2"]) == 0


def test_fit_missing_file(tmp_path, spectra_files, capsys):
    code = cli.main(["fit", "--scat", str(tmp_path / "nope.csv"), "--abs", str(spectra_files["abs"]),
                     "--purcell-f", "1", "1", "--out", str(tmp_path / "x.json")])
    assert code == 1


def test_fit_single_peak(tmp_path, spectra_files, capsys):
    one = spectra.LorentzianFitResult(omega0=(350 * THZ, 350 * THZ), gamma=(10 * THZ, 10 * THZ), amp=(1.0, 0.0))
    path = tmp_path / "one.csv"
    spectra.write_spectrum_csv(spectra.synth_spectrum(one, np.linspace(300, 400, 100) * THZ), path)
    code = cli.main(["fit", "--scat", str(path), "--abs", str(spectra_files["abs"]),
                     "--purcell-f", "1", "1", "--out", str(tmp_path / "x.json")])
    assert code == 1
    assert "fewer than two peaks" in capsys.readouterr().err


def test_fit_non_convergence_exit_code(tmp_path, spectra_files, monkeypatch):
    real = spectra.fit_two_lorentzians
    monkeypatch.setattr(spectra, "fit_two_lorentzians", lambda s, window=3.0: real(s, window=window, max_iter=1, ftol=0))
    out = tmp_path / "nc.json"
    code = cli.main(["fit", "--scat", str(spectra_files["scat"]), "--abs", str(spectra_files["abs"]),
                     "--purcell-f", "1", "1", "--out", str(out)])
    assert code == 2
    assert json.loads(out.read_text())["source"]["converged"] is False


def test_solve_json_and_csv(tmp_path, run_cfg, capsys):
    assert cli.main(["solve", "--config", str(run_cfg)]) == 0
    row = json.loads(capsys.readouterr().out)
    assert 1e8 < row["rate"] < 1e10 and row["e_n"] > 0.5
    out = tmp_path / "o.csv"
    assert cli.main(["solve", "--config", str(run_cfg), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and float(rows[0]["rate"]) == row["rate"]
    assert cli.main(["solve", "--config", str(run_cfg), "--out", str(out)]) == 1
    assert cli.main(["solve", "--config", str(run_cfg), "--out", str(out), "--force"]) == 0


def test_solve_is_deterministic(tmp_path, run_cfg):
    for name in ("a.csv", "b.csv"):
        assert cli.main(["solve", "--config", str(run_cfg), "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_solve_vacuum_warning(tmp_path, capsys):
    cfg = write_json(tmp_path / "p0.json", {"antenna": {"table1_delta_l_nm": 0}, "emitter": {"pump_per_s": 0}})
    assert cli.main(["solve", "--config", str(cfg)]) == 0
    captured = capsys.readouterr()
    row = json.loads(captured.out)
    assert row["rate"] == 0.0 and row["e_n"] == 0.0
    assert "vacuum" in captured.err


def test_solve_decoupled_population(tmp_path, capsys):
    doc = model.antenna_to_dict(model.table1_antenna(0).with_kappas((0.0, 0.0)))
    cfg = write_json(tmp_path / "k0.json", {"antenna": doc, "emitter": {"pump_per_s": 1e9}})
    assert cli.main(["solve", "--config", str(cfg)]) == 0
    row = json.loads(capsys.readouterr().out)
    g = model.gamma_fs(model.default_emitter(model.table1_antenna(0)))
    assert row["p_e"] == pytest.approx(1e9 / (1e9 + g), rel=1e-10)


def test_degenerate_exit_code(tmp_path, run_cfg, monkeypatch):
    from bimodal import pipeline
    from bimodal.errors import DegenerateSteadyStateError

    def boom(*a, **k):
        raise DegenerateSteadyStateError("2-dimensional null space")

    monkeypatch.setattr(pipeline, "evaluate", boom)
    assert cli.main(["solve", "--config", str(run_cfg)]) == 3


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == 1
    bad = write_json(tmp_path / "bad.json", {"antenna": {"table1_delta_l_nm": 0}, "extra": True})
    assert cli.main(["solve", "--config", str(bad)]) == 1
    assert cli.main(["solve", "--config", str(tmp_path / "missing.json")]) == 1


def test_sweep_command(tmp_path):
    cfg = write_json(tmp_path / "s.json", {
        "antenna": {"table1_delta_l_nm": 0}, "truncation": 2, "outputs": ["rate", "e_n"],
        "sweep": {"name": "mini", "axes": [{"name": "theta_deg", "start": 0, "stop": 90, "num": 3}]},
    })
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json", "mini_e_n.csv", "mini_rate.csv"]
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out)]) == 1
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out), "--force"]) == 0


def test_find_optimum_command(tmp_path, capsys):
    doc = {"label": "sym", "modes": [
        {"omega_thz_over_2pi": 380, "gamma_scat_thz_over_2pi": 15, "gamma_abs_thz_over_2pi": 17, "kappa_thz_over_2pi": 2},
        {"omega_thz_over_2pi": 395, "gamma_scat_thz_over_2pi": 15, "gamma_abs_thz_over_2pi": 17, "kappa_thz_over_2pi": 2},
    ]}
    cfg = write_json(tmp_path / "sym.json", {"antenna": doc, "truncation": 2})
    assert cli.main(["find-optimum", "--config", str(cfg)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert abs(res["omega_qe_opt_thz_over_2pi"] - 387.5) <= res["tolerance_thz_over_2pi"]
    assert res["shifted_from_midpoint"] is False


@pytest.mark.skipif(shutil.which("bimodal") is None, reason="console script not installed")
def test_console_script(tmp_path, run_cfg):
    out = subprocess.run(["bimodal", "solve", "--config", str(run_cfg), "--truncation", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "e_n" in json.loads(out.stdout)
