"""
Measurements on trajectories: oscillation fits, kink detection and distances.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.signal import find_peaks

from .errors import ConfigurationError
from .trajectory import Trajectory, l2_distance, sup_distance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OscillationFit:
    """
    Args:
        envelope_rate: Decay rate of the |c0| envelope (amplitude)
        probability_rate: Decay rate of |c0|^2, twice the amplitude rate
        frequency: Dominant angular frequency from the mean |c0| peak spacing
        peak_times: Refined peak positions
        peak_heights: Refined peak values of |c0|
    """

    envelope_rate: float
    probability_rate: float
    frequency: float
    peak_times: np.ndarray
    peak_heights: np.ndarray

    @property
    def n_peaks(self) -> int:
        return int(self.peak_times.size)


def _refine_peaks(t: np.ndarray, y: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    times = t[idx].astype(float)
    heights = y[idx].astype(float)
    for n, i in enumerate(idx):
        if i == 0 or i == y.size - 1:
            continue
        a, b, c = y[i - 1], y[i], y[i + 1]
        denom = a - 2.0 * b + c
        if denom >= 0:
            continue
        delta = 0.5 * (a - c) / denom
        step = 0.5 * (t[i + 1] - t[i - 1])
        times[n] = t[i] + delta * step
        heights[n] = b - 0.25 * (a - c) * delta
    return times, heights


def fit_oscillation(
    trajectory: Trajectory,
    *,
    t_min: float = 0.0,
    prominence: float = 0.05,
) -> OscillationFit:
    """
    Fit envelope decay and frequency from the peaks of |c0|.

    Peaks are located with ``scipy.signal.find_peaks`` (prominence relative to
    the |c0| range), refined by a parabola through the neighbouring samples,
    and the log of their heights is regressed linearly on time.

    Args:
        trajectory: Any Trajectory
        t_min: Ignore samples before this time
        prominence: Minimum peak prominence as a fraction of the |c0| range

    Returns:
        OscillationFit; rates and frequency are NaN when fewer than two peaks exist
    """
    keep = trajectory.t_grid >= t_min
    t = trajectory.t_grid[keep]
    amp = np.abs(trajectory.c0[keep])
    if t.size < 3:
        raise ConfigurationError("not enough samples to fit an oscillation")
    span = float(np.ptp(amp))
    idx, _ = find_peaks(amp, prominence=prominence * span if span > 0 else None)
    times, heights = _refine_peaks(t, amp, idx)

    if times.size < 2:
        logger.warning("fit_oscillation: only %d peak(s) found", times.size)
        return OscillationFit(math.nan, math.nan, math.nan, times, heights)

    frequency = math.pi / float(np.mean(np.diff(times)))
    positive = heights > 0
    slope = np.polyfit(times[positive], np.log(heights[positive]), 1)[0]
    rate = -float(slope)
    return OscillationFit(rate, 2.0 * rate, frequency, times, heights)


def detect_kinks(
    t: Any,
    values: Any,
    *,
    order: int = 6,
    ratio: float = 100.0,
    window: int = 20,
    floor: float | None = None,
) -> list[float]:
    """
    Locate derivative discontinuities on a uniform grid.

    A jump in any derivative below ``order`` turns the order-th finite
    difference into a localized spike. Each stencil is compared against the
    median of the ``2 * window`` stencils before it; runs of flagged stencils
    closer than ``window`` merge into one event, located at the last grid
    point of the first flagged stencil that precedes the kink.

    Returns:
        Kink times, ascending
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values)
    if t.shape != v.shape or t.ndim != 1:
        raise ConfigurationError("t and values must be 1-D arrays of equal length")
    if t.size < order + 2 * window + 2:
        raise ConfigurationError("grid too short for kink detection", points=t.size)
    steps = np.diff(t)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-6, atol=0):
        raise ConfigurationError("kink detection needs a uniform grid")

    diffs = np.abs(np.diff(v, n=order))
    if floor is None:
        floor = 1e-9 * float(np.max(np.abs(v)))
    background = np.empty_like(diffs)
    lead = float(np.median(diffs[: 2 * window]))
    for i in range(diffs.size):
        background[i] = lead if i < window else float(np.median(diffs[max(0, i - 2 * window) : i]))
    flagged = np.flatnonzero((diffs > ratio * background) & (diffs > floor))

    kinks: list[float] = []
    last = -(10**9)
    for i in flagged:
        if i - last > window:
            kinks.append(float(t[i + order - 1]))
        last = i
    return kinks


def trajectory_distance(a: Trajectory, b: Trajectory) -> tuple[float, float]:
    """(sup-norm, L2) distance between two trajectories on a shared grid."""
    return sup_distance(a, b), l2_distance(a, b)


__all__ = ["OscillationFit", "fit_oscillation", "detect_kinks", "trajectory_distance"]
