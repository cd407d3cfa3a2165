import math

import numpy as np
import pytest

from waveguide_cavity.errors import ConfigurationError, NumericalRangeError
from waveguide_cavity.mirror_optics import (
    AtomChain,
    chain_scattering,
    disorder_averaged_reflectance,
    half_width,
    lorentzian_reflectance,
    reflectance_spectrum,
)


def test_lorentzian_values():
    assert lorentzian_reflectance(0.0, 10) == 1.0
    assert lorentzian_reflectance(7.0, 7) == pytest.approx(0.5)
    assert lorentzian_reflectance(30.0, 10) == pytest.approx(0.1)
    with pytest.raises(ConfigurationError):
        lorentzian_reflectance(1.0, 0)


def test_empty_chain_is_transparent():
    res = chain_scattering(AtomChain(()), 3.0)
    assert res.r == 0
    assert res.t == 1


def test_single_atom_on_resonance_reflects_everything():
    res = chain_scattering(AtomChain((0.0,)), 0.0)
    assert res.reflectance == pytest.approx(1.0)
    assert res.transmittance == 0.0


def test_single_atom_matches_lorentzian():
    chain = AtomChain((0.0,))
    for delta in (-2.0, 0.5, 1.0, 4.0):
        assert chain_scattering(chain, delta).reflectance == pytest.approx(lorentzian_reflectance(delta, 1))


@pytest.mark.parametrize("n_atoms", [10, 100])
def test_unitarity(n_atoms):
    chain = AtomChain.bragg(n_atoms)
    for delta in np.linspace(-3 * n_atoms, 3 * n_atoms, 61):
        res = chain_scattering(chain, float(delta))
        assert res.reflectance + res.transmittance == pytest.approx(1.0, abs=1e-10)


def test_bragg_chain_near_resonance_is_lorentzian():
    res = chain_scattering(AtomChain.bragg(100), 50.0)
    assert res.reflectance == pytest.approx(0.8, abs=0.04)


def test_bragg_reflectance_symmetric_in_detuning():
    chain = AtomChain.bragg(50)
    grid = np.linspace(0.5, 150.0, 40)
    np.testing.assert_allclose(reflectance_spectrum(chain, grid), reflectance_spectrum(chain, -grid), atol=1e-8)


@pytest.mark.parametrize("n_atoms", [10, 50, 100])
def test_bandwidth_scales_with_n(n_atoms):
    assert half_width(AtomChain.bragg(n_atoms)) == pytest.approx(n_atoms, rel=0.1)


def test_rigid_translation_only_adds_phase():
    chain = AtomChain.bragg(20, omega_a=50.0)
    moved = chain.shifted(0.37)
    for delta in (-7.0, 3.0, 25.0):
        assert abs(chain_scattering(moved, delta).r) == pytest.approx(abs(chain_scattering(chain, delta).r), abs=1e-10)


def test_positions_must_increase():
    with pytest.raises(ConfigurationError):
        AtomChain((0.0, 1.0, 1.0))


def test_gain_guard_reports_atom_and_detuning():
    with pytest.raises(NumericalRangeError) as info:
        reflectance_spectrum(AtomChain.bragg(10), [0.5], norm_bound=1.0)
    assert info.value.details["atom_index"] == 1
    assert info.value.details["delta"] == 0.5


@pytest.mark.parametrize("n_atoms", [10, 100])
def test_unitarity_close_to_resonance(n_atoms):
    chain = AtomChain.bragg(n_atoms)
    for delta in (1e-9, -1e-7, 1e-5, 1e-3, 1e-2):
        res = chain_scattering(chain, delta)
        assert res.reflectance + res.transmittance == pytest.approx(1.0, abs=1e-10)


def test_tiny_detuning_does_not_abort_spectrum():
    grid = np.array([1e-9, 0.0, 5.0, 30.0])
    spectrum = reflectance_spectrum(AtomChain.bragg(10), grid)
    assert np.all(np.isfinite(spectrum))
    assert spectrum[0] == pytest.approx(1.0, abs=1e-6)
    assert spectrum[1] == pytest.approx(1.0)


def test_disorder_without_noise_equals_ordered_chain():
    grid = np.array([-20.0, 0.5, 10.0])
    chain = AtomChain.bragg(30)
    result = disorder_averaged_reflectance(30, chain.spacing, 0.0, grid, samples=5, seed=3, omega_a=chain.omega_a)
    np.testing.assert_allclose(result.mean, reflectance_spectrum(chain, grid), rtol=1e-12)
    assert np.all(result.stderr == 0.0)
    assert result.meta()["averaging"] == "intensity"


def test_disordered_mirror_stays_reflective():
    spacing = math.pi / 1.0e6
    result = disorder_averaged_reflectance(100, spacing, 0.01, [0.0, 1.0], samples=1000, seed=1337)
    assert np.all(result.mean > 0.9)


def test_single_atom_disorder_is_phase_only():
    result = disorder_averaged_reflectance(1, 0.1, 0.1, [0.7, 2.0], samples=50, seed=11, omega_a=31.4)
    np.testing.assert_allclose(result.mean, lorentzian_reflectance(np.array([0.7, 2.0]), 1), rtol=1e-12)
    assert np.all(result.stderr < 1e-12)


def test_disorder_is_seed_deterministic():
    args = (40, math.pi / 100.0, 0.05, [1.0, 20.0], 20)
    a = disorder_averaged_reflectance(*args, seed=7, omega_a=100.0)
    b = disorder_averaged_reflectance(*args, seed=7, omega_a=100.0)
    c = disorder_averaged_reflectance(*args, seed=8, omega_a=100.0)
    np.testing.assert_array_equal(a.mean, b.mean)
    assert not np.array_equal(a.mean, c.mean)


def test_disorder_rejects_reordering_sigma():
    with pytest.raises(ConfigurationError):
        disorder_averaged_reflectance(10, 0.1, 0.2, [0.0], samples=2, seed=0)
