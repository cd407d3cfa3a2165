import numpy as np
import pytest

from waveguide_cavity.dde_core import (
    IntegratorConfig,
    full_chain_layout,
    integrate_cavity,
    integrate_full_chain,
)
from waveguide_cavity.errors import ConfigurationError
from waveguide_cavity.model import CavityParams


def test_layout_geometry():
    layout = full_chain_layout(3, 0.5, mode_index=10)
    assert layout.positions.size == 7
    assert layout.positions[3] == 0.0
    np.testing.assert_allclose(layout.positions, -layout.positions[::-1], atol=1e-15)
    assert layout.positions[4] == pytest.approx(0.25)
    assert layout.omega_a * layout.spacing == pytest.approx(np.pi)
    assert list(layout.indices) == [-3, -2, -1, 0, 1, 2, 3]


def test_layout_rejects_overlapping_mirrors():
    with pytest.raises(ConfigurationError):
        full_chain_layout(5, 0.5)


def test_mirror_symmetry_single_atom_mirrors():
    layout = full_chain_layout(1, 0.5)
    traj = integrate_full_chain(
        layout.positions, layout.phase_l, IntegratorConfig(t_max=2.0), omega_a=layout.omega_a
    )
    np.testing.assert_allclose(traj.atom(-1), traj.atom(1), atol=1e-8)
    before_return = traj.t_grid < 0.5
    assert np.count_nonzero(before_return) >= 5
    np.testing.assert_allclose(traj.atom(0)[before_return], np.exp(-traj.t_grid[before_return]), atol=1e-6)


def test_zero_coupling_freezes_amplitudes():
    layout = full_chain_layout(2, 0.4, mode_index=5)
    traj = integrate_full_chain(
        layout.positions,
        layout.phase_l,
        IntegratorConfig(t_max=0.5),
        omega_a=layout.omega_a,
        coupling=0.0,
    )
    assert np.all(traj.atom(0) == 1.0)
    assert np.all(traj.atom(2) == 0.0)


def test_bright_mode_matches_lumped_model():
    layout = full_chain_layout(5, 0.5, mode_index=200)
    t = np.linspace(0, 2, 201)
    chain = integrate_full_chain(
        layout.positions, layout.phase_l, IntegratorConfig(t_max=2.0), omega_a=layout.omega_a, t_eval=t
    )
    lumped = integrate_cavity(CavityParams(5, 0.5), IntegratorConfig(t_max=2.0), t_eval=t)
    assert np.max(np.abs(chain.bright_mode() - lumped.cm)) < 0.05
    assert np.max(np.abs(chain.atom(0) - lumped.c0)) < 0.05

    cavity = chain.as_cavity_trajectory()
    assert cavity.method == "dde_full_chain"
    np.testing.assert_array_equal(cavity.c0, chain.atom(0))


def test_chain_validation():
    config = IntegratorConfig(t_max=0.1)
    with pytest.raises(ConfigurationError):
        integrate_full_chain([-0.25, 0.25], 1, config, omega_a=10.0)
    with pytest.raises(ConfigurationError):
        integrate_full_chain([-0.25, 0.1, 0.25], 1, config, omega_a=10.0)
    with pytest.raises(ConfigurationError):
        integrate_full_chain([-0.25, 0.0, 0.25], 1, IntegratorConfig(t_max=1.0, dt=0.3), omega_a=10.0)
    layout = full_chain_layout(1, 0.5)
    traj = integrate_full_chain(layout.positions, 1, config, omega_a=layout.omega_a)
    with pytest.raises(ConfigurationError):
        traj.atom(4)
