import math
import unittest

import pytest

from waveguide_cavity.errors import ConfigurationError
from waveguide_cavity.model import (
    PRESETS,
    CavityParams,
    classify_regime,
    derive_groups,
    figures_of_merit,
    preset,
    presets_consistency,
    presets_document,
)


def test_derived_groups():
    g = derive_groups(CavityParams(n_atoms=100, delay_tau=0.01))
    assert g.a == pytest.approx(1.0)
    assert g.detuning == 0.0
    assert g.half_trip == pytest.approx(0.005)
    assert g.round_trip == pytest.approx(0.01)

    assert derive_groups(CavityParams(100, 0.0002)).a == pytest.approx(0.02)
    detuned = derive_groups(CavityParams(100, 0.01, phase_offset=math.pi / 10))
    assert detuned.detuning == pytest.approx(10 * math.pi)


def test_figures_of_merit_transition():
    fom = figures_of_merit(CavityParams(100, 0.01))
    assert fom.kappa == pytest.approx(0.25)
    assert fom.rabi_freq == pytest.approx(10.0)
    assert fom.critical_n == pytest.approx(100.0)
    assert fom.critical_n_rounded == 100
    assert math.isinf(fom.cooperativity)


def test_figures_of_merit_limits():
    markov = figures_of_merit(CavityParams(100, 1e-9))
    assert markov.kappa == pytest.approx(1.0, abs=1e-6)
    assert markov.rabi_freq == pytest.approx(math.sqrt(200), rel=1e-6)

    macro = figures_of_merit(CavityParams(10**9, 0.02))
    assert macro.rabi_freq == pytest.approx(math.sqrt(2 / 0.02), rel=1e-6)
    assert macro.kappa < 1e-12


def test_kappa_decreases_with_n():
    kappas = [figures_of_merit(CavityParams(n, 0.01)).kappa for n in (1, 10, 100, 1000)]
    assert all(a > b for a, b in zip(kappas, kappas[1:]))


def test_critical_n_times_tau_is_one():
    for tau in (5.3e-4, 0.01, 0.02, 0.37):
        assert figures_of_merit(CavityParams(10, tau)).critical_n * tau == pytest.approx(1.0, rel=1e-15)


def test_cooperativity_with_loss():
    fom = figures_of_merit(CavityParams(100, 0.01, env_rate=0.2))
    assert fom.cooperativity == pytest.approx(2 * 100 * 2 / 0.2)
    assert fom.cycles_ratio == pytest.approx(10.0 / 0.45)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_atoms": 0, "delay_tau": 0.1},
        {"n_atoms": 10, "delay_tau": 0.0},
        {"n_atoms": 10, "delay_tau": -1.0},
        {"n_atoms": 10, "delay_tau": 0.1, "env_rate": -0.1},
        {"n_atoms": 10, "delay_tau": 0.1, "phase_offset": math.pi},
        {"n_atoms": 2.5, "delay_tau": 0.1},
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        CavityParams(**kwargs)


def test_from_physical():
    params = CavityParams.from_physical(16e6, 1e-3, 0.1, n_atoms=1887)
    assert params.delay_tau == pytest.approx(5.337e-4, rel=1e-3)
    assert params.gamma == 16e6


def test_classify_regime():
    assert classify_regime(0.02) == "markovian"
    assert classify_regime(0.1) == "transition"
    assert classify_regime(1.0) == "transition"
    assert classify_regime(10.0) == "transition"
    assert classify_regime(100.0) == "macroscopic"


class TestPresets(unittest.TestCase):
    def test_table_rows(self):
        cs, _ = preset("cesium")
        self.assertAlmostEqual(cs.tau, 5.3e-4)
        self.assertAlmostEqual(cs.gamma_ratio, 1.1)
        qd, _ = preset("quantum_dot")
        self.assertAlmostEqual(qd.tau, 1.0e-2)
        self.assertAlmostEqual(qd.two_gamma_mhz, 6.2e3)
        sc, _ = preset("superconducting")
        self.assertAlmostEqual(sc.tau, 2.0e-2)
        self.assertAlmostEqual(sc.d_mm, 10.0)
        self.assertAlmostEqual(sc.gamma_ratio, 20.0)

    def test_tau_consistency_gate(self):
        for row in PRESETS.values():
            self.assertLessEqual(row.tau_deviation(), 0.1, row.label)

    def test_critical_sizes_and_cycles(self):
        expected = {"cesium": (1887, 21.0), "quantum_dot": (100, 35.0), "superconducting": (50, 20.0)}
        for label, (n_c, cycles) in expected.items():
            row, params = preset(label)
            self.assertAlmostEqual(row.critical_n / n_c, 1.0, delta=0.05)
            self.assertEqual(params.n_atoms, round(row.critical_n))
            ratio = figures_of_merit(params).cycles_ratio
            self.assertAlmostEqual(ratio / cycles, 1.0, delta=0.1, msg=label)

    def test_gamma_ratio_override(self):
        _, params = preset("superconducting", n_atoms=50, gamma_ratio=40.0)
        self.assertAlmostEqual(params.env_rate, 0.05)

    def test_unknown_label(self):
        with self.assertRaises(ConfigurationError):
            preset("rubidium")


def test_presets_document_keys():
    doc = presets_document()
    assert [row["label"] for row in doc] == ["cesium", "quantum_dot", "superconducting"]
    for row in doc:
        assert set(row) == {"label", "omega_a_ghz", "two_gamma_mhz", "gamma_ratio", "vg_over_c", "d_mm", "tau"}


def test_presets_consistency_gate():
    report = presets_consistency()
    assert report["frequency_convention"] == "ordinary"
    assert set(report["presets"]) == {"cesium", "quantum_dot", "superconducting"}
    for check in report["presets"].values():
        assert check["within_gate"] is True
        assert check["relative_deviation"] <= 0.1
