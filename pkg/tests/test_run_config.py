import json
import unittest

import pytest

from waveguide_cavity.errors import ConfigurationError
from waveguide_cavity.run_config import RunConfig, load_run_config


class TestRunConfig(unittest.TestCase):
    def test_direct_parameters(self):
        params = RunConfig(n_atoms=100, delay_tau=0.01, phase_offset=0.1).params()
        self.assertEqual(params.n_atoms, 100)
        self.assertAlmostEqual(params.detuning, 10.0)
        self.assertEqual(params.env_rate, 0.0)

    def test_preset_with_overrides(self):
        params = RunConfig(preset="cesium", n_atoms=500, env_rate=0.0).params()
        self.assertEqual(params.n_atoms, 500)
        self.assertEqual(params.delay_tau, 5.3e-4)
        self.assertEqual(params.env_rate, 0.0)

    def test_preset_default_size(self):
        params = RunConfig(preset="superconducting").params()
        self.assertEqual(params.n_atoms, 50)
        self.assertAlmostEqual(params.env_rate, 0.1)

    def test_physical_inputs(self):
        params = RunConfig(n_atoms=10, gamma_hz=2.998e7, d_m=0.01, vg_over_c=1.0).params()
        self.assertAlmostEqual(params.delay_tau, 1e-3)

    def test_physical_and_direct_delay_conflict(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(n_atoms=10, delay_tau=0.1, gamma_hz=1e7, d_m=0.01, vg_over_c=1.0).params()
        with self.assertRaises(ConfigurationError):
            RunConfig(n_atoms=10, gamma_hz=1e7).params()

    def test_missing_inputs(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(delay_tau=0.1).params()
        with self.assertRaises(ConfigurationError):
            RunConfig(n_atoms=10).params()


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError) as err:
        RunConfig.from_mapping({"n_atoms": 10, "delay": 0.1})
    assert err.value.details["keys"] == ["delay"]


@pytest.mark.parametrize(
    "field, value",
    [("method", "magic"), ("fmt", "xml"), ("precision", "quad"), ("t_max", 0.0), ("n_points", 1)],
)
def test_invalid_fields(field, value):
    with pytest.raises(ConfigurationError):
        RunConfig(**{field: value})


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("WAVEGUIDE_CAVITY_SEED", "99")
    assert RunConfig().seed == 99
    assert RunConfig(seed=5).seed == 5


def test_yaml_file_with_overrides(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("n_atoms: 100\ndelay_tau: 0.01\nmethod: approx\nt_max: 4.0\n")
    cfg = load_run_config(path, method="dde", t_max=None)
    assert cfg.method == "dde"
    assert cfg.t_max == 4.0
    assert cfg.params().a == pytest.approx(1.0)


def test_json_file_is_accepted(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"n_atoms": 5, "delay_tau": 0.5}))
    assert RunConfig.from_file(path).n_atoms == 5


def test_bad_documents(tmp_path):
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(tmp_path / "missing.yaml")
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(listing)
    broken = tmp_path / "broken.yaml"
    broken.write_text("n_atoms: [1, 2\n")
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(broken)
