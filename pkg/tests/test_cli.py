import json
import os
import subprocess
import sys

import numpy as np
import pytest

from eostomo import cli
from eostomo.errors import InvariantViolation
from eostomo.io import read_csv


def run(tmp_path, *args, config=None, name="out"):
    out = tmp_path / name
    argv = list(args) + ["--out", str(out)]
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    return cli.main(argv), out


def test_waveforms_default_parity(tmp_path):
    code, out = run(tmp_path, "waveforms")
    assert code == 0
    columns, data = read_csv(out / "waveforms.csv")
    assert columns == ["t_fs", "e_bl", "h_bl", "e_detected", "h_detected"]
    np.testing.assert_allclose(data[:, 0], -data[::-1, 0], atol=1e-9)
    np.testing.assert_allclose(data[:, 1], data[::-1, 1], atol=1e-9)
    np.testing.assert_allclose(data[:, 2], -data[::-1, 2], atol=1e-9)
    assert (out / "waveforms.svg").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "waveforms" and "waveforms.csv" in manifest["files"]


def test_empty_time_range_gives_header_only(tmp_path):
    code, out = run(tmp_path, "waveforms", config={"waveforms": {"n_times": 0}})
    assert code == 0
    assert (out / "waveforms.csv").read_text() == "t_fs,e_bl,h_bl,e_detected,h_detected\n"


def test_single_point_sweep(tmp_path):
    cfg = {"sweep": {"bandwidths_thz": [150.0], "gamma_floor": 0.0}}
    code, out = run(tmp_path, "sweep", "--quadrature", "E", "--constraint", "constant_intensity", config=cfg)
    assert code == 0
    _, data = read_csv(out / "sweep_E_constant_intensity.csv")
    assert data.shape == (1, 4)
    optimum = json.loads((out / "sweep_E_constant_intensity_optimum.json").read_text())
    assert optimum["bandwidth_thz"] == pytest.approx(150.0)


def test_default_sweep_optimum(tmp_path):
    code, out = run(tmp_path, "sweep")
    assert code == 0
    optimum = json.loads((out / "sweep_E_constant_intensity_optimum.json").read_text())
    assert 100.0 < optimum["bandwidth_thz"] < 140.0
    assert (out / "sweep_E_constant_intensity.svg").exists()


def test_infeasible_sweep_exit_code(tmp_path):
    cfg = {"sweep": {"n_points": 5, "gamma_floor": 0.9999}}
    code, out = run(tmp_path, "sweep", config=cfg)
    assert code == cli.EXIT_INFEASIBLE
    # the sweep itself is still written
    assert (out / "sweep_E_constant_intensity.csv").exists()


def test_unknown_key_exit_code(tmp_path):
    code, _ = run(tmp_path, "waveforms", config={"grid": {"resolution": 3}})
    assert code == cli.EXIT_CONFIG


def test_missing_config_exit_code(tmp_path):
    assert cli.main(["waveforms", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    def broken(cfg, out):
        raise InvariantViolation("negative variance")

    monkeypatch.setitem(cli.COMMANDS, "waveforms", broken)
    code, _ = run(tmp_path, "waveforms")
    assert code == cli.EXIT_INVARIANT


def test_bad_choice_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["sweep", "--quadrature", "Z"])
    assert info.value.code == 2


def test_bad_phi_list_is_usage_error():
    with pytest.raises(SystemExit):
        cli.main(["variant", "phase_scan", "--phi-list", "0,abc"])


def test_env_var_sets_output_directory(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv(cli.OUT_ENV, str(target))
    assert cli.main(["waveforms", "--config", _write(tmp_path, {"waveforms": {"n_times": 3}})]) == 0
    assert (target / "waveforms.csv").exists()


def _write(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_beam_splitter_full_transmission_is_h_only(tmp_path):
    code, out = run(tmp_path, "variant", "beam_splitter", "--transmission", "1")
    assert code == 0
    columns, data = read_csv(out / "variant_beam_splitter.csv")
    row = dict(zip(columns, data[0]))
    assert row["theta_E_arm"] == 0.0
    assert row["theta_H_arm"] == pytest.approx(row["theta_H_full"])
    assert row["sum_rule"] == pytest.approx(1.0)


def test_beam_splitter_default_balances(tmp_path):
    code, out = run(tmp_path, "variant", "beam_splitter")
    assert code == 0
    columns, data = read_csv(out / "variant_beam_splitter.csv")
    row = dict(zip(columns, data[0]))
    assert row["theta_E_arm"] == pytest.approx(row["theta_H_arm"], rel=1e-9)
    assert row["transmission"] == pytest.approx(row["theta_E_full"] / (row["theta_E_full"] + row["theta_H_full"]),
                                                rel=1e-9)


def test_phase_scan_outputs(tmp_path):
    cfg = {"tomography": {"n_times": 101}}
    code, out = run(tmp_path, "variant", "phase_scan", "--phi-list", "0,1.5707963267948966", config=cfg)
    assert code == 0
    columns, data = read_csv(out / "variant_phase_scan.csv")
    assert data.shape == (2, len(columns))
    reference = json.loads((out / "variant_phase_scan_reference.json").read_text())
    assert set(reference) == {"E", "H"}


def test_tomography_outputs_and_seeded_shots(tmp_path):
    cfg = {"tomography": {"n_times": 81, "husimi_points": 11}}
    code_a, out_a = run(tmp_path, "tomography", "--shots", "500", "--seed", "9", config=cfg, name="a")
    code_b, out_b = run(tmp_path, "tomography", "--shots", "500", "--seed", "9", config=cfg, name="b")
    code_c, out_c = run(tmp_path, "tomography", "--shots", "500", "--seed", "10", config=cfg, name="c")
    assert code_a == code_b == code_c == 0
    assert (out_a / "shots.csv").read_bytes() == (out_b / "shots.csv").read_bytes()
    assert (out_a / "shots.csv").read_bytes() != (out_c / "shots.csv").read_bytes()
    _, husimi = read_csv(out_a / "husimi.csv")
    assert husimi.shape == (121, 3)
    manifest = json.loads((out_a / "manifest.json").read_text())
    assert manifest["seed"] == 9


def test_vacuum_signal_gives_flat_curves(tmp_path):
    cfg = {"signal": {"r": 0.0}, "tomography": {"n_times": 41}}
    code, out = run(tmp_path, "tomography", config=cfg)
    assert code == 0
    _, data = read_csv(out / "tomography.csv")
    assert np.all(data[:, 1:] == 0.0)


def test_csv_only_output(tmp_path):
    code, out = run(tmp_path, "waveforms", config={"output": {"formats": ["csv"]}, "waveforms": {"n_times": 5}})
    assert code == 0
    assert not (out / "waveforms.svg").exists()


def test_console_script_entry_point(tmp_path):
    env = dict(os.environ, EOSTOMO_OUT=str(tmp_path / "script"))
    proc = subprocess.run([sys.executable, "-m", "eostomo.cli", "waveforms", "--config",
                           _write(tmp_path, {"waveforms": {"n_times": 3}})],
                          env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "script" / "waveforms.csv").exists()
