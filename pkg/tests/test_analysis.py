import math

import numpy as np
import pytest

from waveguide_cavity.analysis import detect_kinks, fit_oscillation, trajectory_distance
from waveguide_cavity.errors import ConfigurationError
from waveguide_cavity.trajectory import Trajectory


def _damped(rate, freq, t_max=10.0, points=4001):
    t = np.linspace(0, t_max, points)
    return Trajectory(t, np.exp(-rate * t) * np.cos(freq * t))


def test_fit_recovers_rate_and_frequency():
    fit = fit_oscillation(_damped(0.3, 5.0))
    assert fit.envelope_rate == pytest.approx(0.3, rel=0.02)
    assert fit.probability_rate == pytest.approx(0.6, rel=0.02)
    assert fit.frequency == pytest.approx(5.0, rel=0.01)
    assert fit.n_peaks >= 10


def test_fit_respects_start_time():
    fit = fit_oscillation(_damped(0.3, 5.0), t_min=5.0)
    assert np.all(fit.peak_times >= 5.0)
    assert fit.frequency == pytest.approx(5.0, rel=0.01)


def test_fit_without_oscillation_returns_nan(caplog):
    t = np.linspace(0, 5, 501)
    fit = fit_oscillation(Trajectory(t, np.exp(-t)))
    assert math.isnan(fit.envelope_rate)
    assert math.isnan(fit.frequency)
    assert "peak" in caplog.text


def test_kink_in_third_derivative():
    t = np.linspace(0, 2, 201)
    v = np.sin(t) + np.where(t > 1.0, (t - 1.0) ** 3, 0.0)
    kinks = detect_kinks(t, v)
    assert kinks == [pytest.approx(1.0, abs=0.01)]


def test_smooth_signal_has_no_kinks():
    t = np.linspace(0, 2, 201)
    assert detect_kinks(t, np.sin(3 * t) * np.exp(-t)) == []


def test_kink_detection_input_checks():
    t = np.linspace(0, 1, 101)
    with pytest.raises(ConfigurationError):
        detect_kinks(t, np.zeros(100))
    with pytest.raises(ConfigurationError):
        detect_kinks(t[:20], np.zeros(20))
    with pytest.raises(ConfigurationError):
        detect_kinks(t**2, np.zeros(101))


def test_trajectory_distance():
    a = _damped(0.3, 5.0, points=101)
    b = Trajectory(a.t_grid, a.c0 + 0.01)
    sup, l2 = trajectory_distance(a, b)
    assert sup == pytest.approx(0.01)
    assert l2 > 0
    assert trajectory_distance(a, a) == (0.0, 0.0)
