import json

import numpy as np
import pytest

from eostomo.config import ExperimentConfig, load_config, load_config_dict
from eostomo.constants import thz_to_omega
from eostomo.errors import ConfigurationError
from eostomo.io import atomic_write_text, csv_text, read_csv, versions, write_csv, write_json, write_manifest


# -- configuration ------------------------------------------------------------

def test_defaults_build_chain():
    cfg = load_config(None)
    chain = cfg.chain()
    assert chain.grid.n_points == 5120
    assert chain.omega_m == pytest.approx(thz_to_omega(40.0))
    assert chain.crystal.length_L == pytest.approx(7e-6)


def test_band_edge_follows_signal_centre():
    cfg = load_config_dict({"signal": {"omega0_thz": 15.0}})
    assert cfg.chain().omega_m == pytest.approx(thz_to_omega(30.0))
    cfg = load_config_dict({"signal": {"omega0_thz": 15.0, "omega_m_thz": 45.0}})
    assert cfg.chain().omega_m == pytest.approx(thz_to_omega(45.0))


@pytest.mark.parametrize("data", [
    {"bogus": {}},
    {"grid": {"n_points": 100, "extra": 1}},
    {"grid": {"n_points": "many"}},
    {"ports": {"e_split_thz": 350.0, "h_split_thz": 340.0}},
    {"sweep": {"quadrature": "B"}},
    {"sweep": {"bandwidths_thz": [10.0, -5.0]}},
    {"probe": {"e_full_bandwidth_thz": 900.0}},
    {"crystal": {"length_um": 0}},
])
def test_invalid_configs_rejected(data):
    with pytest.raises(ConfigurationError):
        load_config_dict(data)


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigurationError):
        load_config(arr)


def test_override_and_digest():
    cfg = ExperimentConfig()
    same = cfg.override(**{"tomography.seed": None})
    assert same.digest() == cfg.digest()
    changed = cfg.override(**{"tomography.seed": 5})
    assert changed.tomography.seed == 5
    assert changed.digest() != cfg.digest()
    with pytest.raises(ConfigurationError):
        cfg.override(**{"tomography.colour": 1})


def test_layout_uses_port_splits():
    cfg = load_config_dict({"ports": {"e_split_thz": 270.0, "h_split_thz": 345.0}})
    layout = cfg.layout()
    assert layout.e_split == pytest.approx(thz_to_omega(270.0))
    assert layout.h_center == pytest.approx(thz_to_omega(345.0))


# -- file output --------------------------------------------------------------

def test_csv_format_is_fixed():
    text = csv_text(("a", "b"), [(1, -0.0), (np.int64(2), 1.5)])
    assert text == "a,b\n1,0.0000000000e+00\n2,1.5000000000e+00\n"


def test_csv_row_length_checked():
    with pytest.raises(ValueError):
        csv_text(("a", "b"), [(1,)])


def test_csv_roundtrip(tmp_path):
    path = write_csv(tmp_path / "x.csv", ("u", "v"), np.array([[1.0, 2.0], [3.0, 4.0]]))
    columns, data = read_csv(path)
    assert columns == ["u", "v"]
    np.testing.assert_array_equal(data, [[1.0, 2.0], [3.0, 4.0]])


def test_empty_csv_has_header(tmp_path):
    path = write_csv(tmp_path / "empty.csv", ("u", "v"), np.zeros((0, 2)))
    assert path.read_text() == "u,v\n"
    columns, data = read_csv(path)
    assert data.shape == (0, 2)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    atomic_write_text(tmp_path / "sub" / "f.txt", "hello")
    assert (tmp_path / "sub" / "f.txt").read_text() == "hello"
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]


def test_json_and_manifest(tmp_path):
    write_json(tmp_path / "a.json", {"b": np.float64(1.5), "a": np.arange(2)})
    assert json.loads((tmp_path / "a.json").read_text()) == {"a": [0, 1], "b": 1.5}
    path = write_manifest(tmp_path, "sweep", "abc", None, [tmp_path / "a.json"])
    manifest = json.loads(path.read_text())
    assert manifest["config_sha256"] == "abc" and manifest["files"] == ["a.json"]
    assert set(versions()) >= {"numpy", "scipy", "backend"}
