import cmath

import numpy as np
import pytest

from waveguide_cavity.dde_core import IntegratorConfig, integrate_cavity
from waveguide_cavity.errors import ConfigurationError, MethodValidityError
from waveguide_cavity.laplace_series import (
    RationalFunction,
    fk_transform,
    kernel_weight,
    laplace_transform,
    series_c0,
    talbot_inverse,
    term_fk,
)
from waveguide_cavity.model import CavityParams


def test_first_term_is_single_atom_decay():
    t = np.linspace(0, 3, 31)
    f0 = term_fk(0, CavityParams(10, 0.5))
    np.testing.assert_allclose(f0(t), np.exp(-t), atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_higher_terms_start_at_zero(k):
    assert abs(term_fk(k, CavityParams(10, 0.5))(0.0)[0]) < 1e-10


def test_merged_pole_for_single_atom_mirrors():
    fk = term_fk(2, CavityParams(1, 0.5))
    assert fk.poles == [-1.0]
    assert abs(fk(0.0)[0]) < 1e-12


def test_term_matches_numerical_inversion():
    params = CavityParams(10, 0.5)
    f2 = term_fk(2, params)(0.3)[0]
    numeric = talbot_inverse(fk_transform(2, params), 0.3)[0]
    assert f2.real == pytest.approx(numeric, abs=1e-6)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_closed_form_transform_round_trip(k):
    params = CavityParams(10, 0.5)
    rebuilt = term_fk(k, params).to_rational()
    assert rebuilt.coefficient_distance(fk_transform(k, params)) <= 1e-8


def test_kernel_sum_reproduces_exact_transform():
    params = CavityParams(10, 0.3, phase_offset=0.3, env_rate=0.4)
    s = 1.5 + 0.7j
    sp = s + 0.2
    total = sum(fk_transform(k, params)(sp) * cmath.exp(-sp * k * 0.3) for k in range(31))
    assert abs(total - laplace_transform(params)(s)) < 1e-10


def test_transform_tends_to_markov_limit():
    params = CavityParams(100, 1e-9)
    s = 2.0 + 3.0j
    expected = s / (s * s + s + 200)
    assert abs(laplace_transform(params)(s) - expected) < 1e-6


def test_kernel_weight():
    params = CavityParams(10, 0.2, phase_offset=0.5, env_rate=1.0)
    assert kernel_weight(params) == pytest.approx(cmath.exp(0.5j + 0.1))


def test_series_is_single_atom_decay_before_first_return():
    params = CavityParams(100, 0.5)
    t = np.linspace(0, 0.5, 26)
    traj = series_c0(params, t)
    np.testing.assert_allclose(traj.c0, np.exp(-t), atol=1e-14)
    assert traj.meta["k_max"] == 2
    assert traj.cm is None


def test_truncation_is_exact_on_the_window():
    params = CavityParams(20, 0.4, phase_offset=0.2)
    t = np.linspace(0, 1.5, 61)
    short = series_c0(params, t)
    longer = series_c0(params, t, k_max=12)
    np.testing.assert_array_equal(short.c0, longer.c0)
    assert longer.meta["terms_built"] == short.meta["terms_built"]


def test_order_limit():
    params = CavityParams(10, 0.01)
    with pytest.raises(MethodValidityError) as err:
        series_c0(params, np.linspace(0, 1, 11), k_max=301)
    assert err.value.details["limit"] == 300
    with pytest.raises(MethodValidityError):
        term_fk(301, params)
    with pytest.raises(ConfigurationError):
        term_fk(-1, params)


def test_rational_function_normalises_denominator():
    r = RationalFunction((2.0,), (2.0, 2.0))
    assert r.denominator == (1 + 0j, 1 + 0j)
    assert r(1.0) == pytest.approx(0.5)
    assert r(0.0) == pytest.approx(1.0)


def test_talbot_rejects_non_positive_time():
    with pytest.raises(ConfigurationError):
        talbot_inverse(lambda s: 1 / (s + 1), [0.0, 1.0])


@pytest.mark.slow
def test_series_matches_dde_at_long_delay():
    params = CavityParams(100, 0.5)
    t = np.linspace(0, 3, 301)
    series = series_c0(params, t)
    dde = integrate_cavity(params, IntegratorConfig(t_max=3.0, dt=2.5e-4), t_eval=t)
    assert np.max(np.abs(series.c0 - dde.c0)) <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("tau", [0.05, 0.1, 0.5])
@pytest.mark.parametrize("n_atoms", [10, 100])
def test_series_agrees_with_dde_grid(tau, n_atoms):
    params = CavityParams(n_atoms, tau)
    t = np.linspace(0, 3, 61)
    series = series_c0(params, t)
    dde = integrate_cavity(params, IntegratorConfig(t_max=3.0), t_eval=t)
    assert np.max(np.abs(series.c0 - dde.c0)) <= 1e-5


@pytest.mark.slow
def test_series_with_phase_and_loss_matches_dde():
    params = CavityParams(10, 0.1, phase_offset=0.5, env_rate=0.3)
    t = np.linspace(0, 2, 41)
    series = series_c0(params, t)
    dde = integrate_cavity(params, IntegratorConfig(t_max=2.0, dt=5e-4), t_eval=t)
    assert np.max(np.abs(series.c0 - dde.c0)) <= 1e-5
