"""
Time-domain results shared by every solution method.

A Trajectory holds the central-atom amplitude c0 and, when the method
provides it, the mirror bright-mode amplitude cm on a strictly increasing
grid starting at t = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from .constants import MAX_OUTPUT_ROWS
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["t_gamma", "re_c0", "im_c0", "p0", "re_cm", "im_cm"]


@dataclass(frozen=True)
class DelayState:
    c0: complex
    cm: complex

    @property
    def p0(self) -> float:
        return abs(self.c0) ** 2

    @property
    def pm(self) -> float:
        return abs(self.cm) ** 2

    @property
    def total(self) -> float:
        return self.p0 + self.pm


@dataclass
class Trajectory:
    """
    Amplitudes on a time grid.

    Args:
        t_grid: Strictly increasing times in units of 1/gamma
        c0: Complex central-atom amplitude per grid point
        cm: Complex bright-mode amplitude per grid point, or None
        meta: Method tag, step size, params echo and method-specific extras
    """

    t_grid: np.ndarray
    c0: np.ndarray
    cm: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.c0 = np.asarray(self.c0, dtype=complex)
        if self.cm is not None:
            self.cm = np.asarray(self.cm, dtype=complex)
        if self.t_grid.ndim != 1 or self.t_grid.size == 0:
            raise ConfigurationError("t_grid must be a non-empty 1-D array")
        if self.t_grid.size > 1 and not np.all(np.diff(self.t_grid) > 0):
            raise ConfigurationError("t_grid must be strictly increasing")
        if self.c0.shape != self.t_grid.shape:
            raise ConfigurationError("c0 must match t_grid in length")
        if self.cm is not None and self.cm.shape != self.t_grid.shape:
            raise ConfigurationError("cm must match t_grid in length")

    def __len__(self) -> int:
        return int(self.t_grid.size)

    @property
    def method(self) -> str:
        return str(self.meta.get("method", "unknown"))

    @property
    def p0(self) -> np.ndarray:
        return np.abs(self.c0) ** 2

    def state(self, index: int) -> DelayState:
        cm = complex(self.cm[index]) if self.cm is not None else complex("nan")
        return DelayState(complex(self.c0[index]), cm)

    @property
    def samples(self) -> list[DelayState]:
        return [self.state(i) for i in range(len(self))]

    def decimate(self, max_rows: int = MAX_OUTPUT_ROWS) -> Trajectory:
        """Keep every k-th row so at most ``max_rows`` remain; t = 0 is always kept."""
        if max_rows < 2:
            raise ConfigurationError("max_rows must be >= 2", max_rows=max_rows)
        n = len(self)
        if n <= max_rows:
            return self
        stride = int(np.ceil((n - 1) / (max_rows - 1)))
        idx = np.arange(0, n, stride)
        logger.debug("Decimating %d rows with stride %d", n, stride)
        meta = dict(self.meta, decimation_stride=stride)
        cm = self.cm[idx] if self.cm is not None else None
        return Trajectory(self.t_grid[idx], self.c0[idx], cm, meta)

    def to_frame(self) -> pd.DataFrame:
        cm = self.cm if self.cm is not None else np.full(len(self), np.nan, dtype=complex)
        return pd.DataFrame(
            {
                "t_gamma": self.t_grid,
                "re_c0": self.c0.real,
                "im_c0": self.c0.imag,
                "p0": self.p0,
                "re_cm": cm.real,
                "im_cm": cm.imag,
            },
            columns=TRAJECTORY_COLUMNS,
        )


def _check_shared_grid(a: Trajectory, b: Trajectory) -> None:
    if a.t_grid.shape != b.t_grid.shape or not np.allclose(a.t_grid, b.t_grid, rtol=0, atol=1e-12):
        raise ConfigurationError("trajectories must share the same time grid")


def sup_distance(a: Trajectory, b: Trajectory) -> float:
    """max_t |c0_a(t) - c0_b(t)| on a shared grid."""
    _check_shared_grid(a, b)
    return float(np.max(np.abs(a.c0 - b.c0)))


def l2_distance(a: Trajectory, b: Trajectory) -> float:
    """Root-mean-square of |c0_a - c0_b| over the grid span (trapezoid rule)."""
    _check_shared_grid(a, b)
    diff = np.abs(a.c0 - b.c0) ** 2
    span = a.t_grid[-1] - a.t_grid[0]
    if span <= 0:
        return float(np.sqrt(diff[0]))
    return float(np.sqrt(trapezoid(diff, a.t_grid) / span))


def uniform_grid(t_max: float, n_points: int) -> np.ndarray:
    if not np.isfinite(t_max) or t_max <= 0:
        raise ConfigurationError("t_max must be finite and > 0", t_max=t_max)
    if n_points < 2:
        raise ConfigurationError("n_points must be >= 2", n_points=n_points)
    return np.linspace(0.0, t_max, int(n_points))


def as_time_grid(t: Any) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(t, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigurationError("time grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise ConfigurationError("time grid must be finite and non-negative")
    return grid


__all__ = [
    "DelayState",
    "Trajectory",
    "TRAJECTORY_COLUMNS",
    "sup_distance",
    "l2_distance",
    "uniform_grid",
    "as_time_grid",
]
