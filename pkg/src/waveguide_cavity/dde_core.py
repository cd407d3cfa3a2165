"""
Direct time-domain integration of the cavity delay differential equations.

The lumped system couples the central atom c0 to the mirror bright mode cm:

    c0' = -c0 - sqrt(2N) e^{i theta/2} cm(t - tau/2) H(t - tau/2)
    cm' = -sqrt(2N) e^{i theta/2} c0(t - tau/2) H(t - tau/2)
          - N [cm + e^{i theta} cm(t - tau) H(t - tau)]

with theta = pi + phi, H(0) = 0 and (c0, cm) = (1, 0) at t = 0. Environment
loss adds -gamma_0/2 damping on both amplitudes.

The scheme is classical RK4 on a grid where tau/2 is an integer number of
steps, so delayed arguments always fall on stored nodes or interval
midpoints of completed history (method of steps). Midpoint values come from
cubic Hermite interpolation of the stored node values and one-sided node
derivatives, which keeps the delayed-term activation kinks on step
boundaries.

The full-chain integrator advances all 2N+1 atoms with every pairwise delay.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .constants import MAX_OUTPUT_ROWS
from .errors import ConfigurationError, NumericalFailure
from .model import CavityParams, derive_groups, figures_of_merit
from .trajectory import Trajectory, as_time_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Args:
        t_max: Integration horizon in units of 1/gamma
        dt: Step size; None picks a default resolving the delay and the Rabi frequency
        dense_order: Interpolation order for delayed lookups and output (cubic only)
        max_rows: Output rows kept after decimation when no t_eval is given
    """

    t_max: float
    dt: float | None = None
    dense_order: int = 3
    max_rows: int = MAX_OUTPUT_ROWS

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_max) or self.t_max <= 0:
            raise ConfigurationError("t_max must be finite and > 0", t_max=self.t_max)
        if self.dt is not None and (not math.isfinite(self.dt) or self.dt <= 0):
            raise ConfigurationError("dt must be finite and > 0", dt=self.dt)
        if self.dense_order != 3:
            raise ConfigurationError(
                "only cubic Hermite dense output is supported", dense_order=self.dense_order
            )
        if self.max_rows < 2:
            raise ConfigurationError("max_rows must be >= 2", max_rows=self.max_rows)


def default_step(params: CavityParams) -> float:
    half_trip = derive_groups(params).half_trip
    rabi = figures_of_merit(params).rabi_freq
    return min(half_trip / 8.0, 0.002 / max(1.0, rabi), 0.5 / params.n_atoms)


def _hermite(y0: np.ndarray, y1: np.ndarray, d0: np.ndarray, d1: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    s2 = s * s
    s3 = s2 * s
    return (
        (2 * s3 - 3 * s2 + 1) * y0
        + (s3 - 2 * s2 + s) * h * d0
        + (-2 * s3 + 3 * s2) * y1
        + (s3 - s2) * h * d1
    )


def integrate_cavity(
    params: CavityParams,
    config: IntegratorConfig,
    *,
    t_eval: Any = None,
    markov: bool = False,
) -> Trajectory:
    """
    Integrate the lumped central-atom / bright-mode delay equations.

    Args:
        params: Cavity parameters
        config: Horizon and step settings
        t_eval: Optional output times in [0, t_max]; filled by Hermite interpolation
        markov: Drop both delays (Markov approximation)

    Returns:
        Trajectory with c0 and cm

    Raises:
        ConfigurationError: if dt does not resolve the half round trip (dt > tau/16)
        NumericalFailure: on a non-finite state, with the offending time
    """
    groups = derive_groups(params)
    half_trip = groups.half_trip
    dt = config.dt if config.dt is not None else default_step(params)
    if not markov and dt > half_trip / 8.0 * (1 + 1e-12):
        raise ConfigurationError(
            "dt must resolve the half round trip (dt <= tau/16)", dt=dt, half_trip=half_trip
        )

    if markov:
        m_half = 0
    else:
        m_half = max(1, math.ceil(half_trip / dt - 1e-9))
        dt = half_trip / m_half
    m_full = 2 * m_half
    n_steps = max(1, math.ceil(config.t_max / dt - 1e-9))

    n = params.n_atoms
    loss = 0.5 * params.env_rate
    phi = params.phase_offset
    # e^{i theta/2} = i e^{i phi/2}, e^{i theta} = -e^{i phi}
    g = -math.sqrt(2.0 * n) * 1j * cmath.exp(0.5j * phi)
    echo = n * cmath.exp(1j * phi)
    self_rate = n + loss
    atom_rate = 1.0 + loss

    y0 = [0j] * (n_steps + 1)
    ym = [0j] * (n_steps + 1)
    d0_left = [0j] * (n_steps + 1)  # derivative at node i used by step i
    dm_left = [0j] * (n_steps + 1)
    d0_right = [0j] * (n_steps + 1)  # derivative at node i+1 as seen by step i
    dm_right = [0j] * (n_steps + 1)
    y0[0] = 1.0 + 0j

    h = dt
    half = 0.5 * h
    eighth = 0.125 * h

    def delayed(store: list, left: list, right: list, j: int, stage: int) -> complex:
        # stage 0: start node, 1: interval midpoint, 2: end node of interval j
        if j < 0:
            return 0j
        if stage == 0:
            return store[j]
        if stage == 2:
            return store[j + 1]
        return 0.5 * (store[j] + store[j + 1]) + eighth * (left[j] - right[j])

    def rhs(c0: complex, cm: complex, c0_half: complex, cm_half: complex, cm_full: complex) -> tuple[complex, complex]:
        dc0 = -atom_rate * c0 + g * cm_half
        dcm = g * c0_half - self_rate * cm + echo * cm_full
        return dc0, dcm

    def markov_rhs(c0: complex, cm: complex) -> tuple[complex, complex]:
        return rhs(c0, cm, c0, cm, cm)

    k1 = (0j, 0j)
    for i in range(n_steps):
        a0, am = y0[i], ym[i]
        if markov:
            k1 = markov_rhs(a0, am)
            k2 = markov_rhs(a0 + half * k1[0], am + half * k1[1])
            k3 = markov_rhs(a0 + half * k2[0], am + half * k2[1])
            k4 = markov_rhs(a0 + h * k3[0], am + h * k3[1])
        else:
            jh = i - m_half
            jf = i - m_full
            if i == 0 or i == m_half or i == m_full:
                # delayed terms switch on at this node: right-limit derivative
                k1 = rhs(
                    a0,
                    am,
                    delayed(y0, d0_left, d0_right, jh, 0),
                    delayed(ym, dm_left, dm_right, jh, 0),
                    delayed(ym, dm_left, dm_right, jf, 0),
                )
            c0_mid = delayed(y0, d0_left, d0_right, jh, 1)
            cm_mid = delayed(ym, dm_left, dm_right, jh, 1)
            cf_mid = delayed(ym, dm_left, dm_right, jf, 1)
            k2 = rhs(a0 + half * k1[0], am + half * k1[1], c0_mid, cm_mid, cf_mid)
            k3 = rhs(a0 + half * k2[0], am + half * k2[1], c0_mid, cm_mid, cf_mid)
            c0_end = delayed(y0, d0_left, d0_right, jh, 2)
            cm_end = delayed(ym, dm_left, dm_right, jh, 2)
            cf_end = delayed(ym, dm_left, dm_right, jf, 2)
            k4 = rhs(a0 + h * k3[0], am + h * k3[1], c0_end, cm_end, cf_end)

        b0 = a0 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        bm = am + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        if not (cmath.isfinite(b0) and cmath.isfinite(bm)):
            raise NumericalFailure("non-finite state", time=(i + 1) * h)
        y0[i + 1] = b0
        ym[i + 1] = bm
        d0_left[i], dm_left[i] = k1

        if markov:
            end = markov_rhs(b0, bm)
        else:
            end = rhs(b0, bm, c0_end, cm_end, cf_end)
        d0_right[i], dm_right[i] = end
        # first-same-as-last; recomputed at activation nodes
        k1 = end
        if i and i % 50_000 == 0:
            logger.debug("dde: step %d/%d (t=%.4g)", i, n_steps, i * h)

    d0_left[n_steps], dm_left[n_steps] = d0_right[n_steps - 1], dm_right[n_steps - 1]

    t_nodes = h * np.arange(n_steps + 1)
    c0 = np.asarray(y0, dtype=complex)
    cm = np.asarray(ym, dtype=complex)
    meta: dict[str, Any] = {
        "method": "dde",
        "dt": h,
        "steps": n_steps,
        "markov": markov,
        "theta_branch": "n=0",
        **{f"param_{k}": v for k, v in params.to_dict().items()},
    }

    if t_eval is None:
        mask = t_nodes <= config.t_max + 1e-12 * max(1.0, config.t_max)
        traj = Trajectory(t_nodes[mask], c0[mask], cm[mask], meta)
        return traj.decimate(config.max_rows)

    grid = as_time_grid(t_eval)
    if grid[-1] > t_nodes[-1] * (1 + 1e-12):
        raise ConfigurationError("t_eval beyond the integration horizon", t_max=float(t_nodes[-1]))
    left = (np.asarray(d0_left, dtype=complex), np.asarray(dm_left, dtype=complex))
    right = (np.asarray(d0_right, dtype=complex), np.asarray(dm_right, dtype=complex))
    idx = np.minimum((grid / h).astype(int), n_steps - 1)
    s = grid / h - idx
    out0 = _hermite(c0[idx], c0[idx + 1], left[0][idx], right[0][idx], h, s)
    outm = _hermite(cm[idx], cm[idx + 1], left[1][idx], right[1][idx], h, s)
    return Trajectory(grid, out0, outm, meta)


@dataclass(frozen=True)
class ChainLayout:
    """Central atom at 0 and two Bragg mirrors at +/-(tau/2 + k d_m)."""

    positions: np.ndarray
    indices: np.ndarray
    omega_a: float
    phase_l: int
    spacing: float


def full_chain_layout(
    n_per_mirror: int,
    delay_tau: float,
    mode_index: int = 0,
    order: int = 1,
    phase_offset: float = 0.0,
) -> ChainLayout:
    """
    Positions for the explicit chain, in units of v_g/gamma.

    The atomic frequency is fixed by theta = (2 mode_index + 1) pi + phase_offset,
    omega_a = theta / tau, and the mirror spacing by omega_a d_m = order * pi.
    """
    if n_per_mirror < 1 or delay_tau <= 0 or order < 1 or mode_index < 0:
        raise ConfigurationError("invalid full-chain layout parameters")
    theta = (2 * mode_index + 1) * math.pi + phase_offset
    omega_a = theta / delay_tau
    d_m = order * math.pi / omega_a
    if (n_per_mirror - 1) * d_m >= delay_tau / 2:
        raise ConfigurationError("mirrors overlap the central atom", spacing=d_m)
    js = np.arange(-n_per_mirror, n_per_mirror + 1)
    pos = np.zeros(js.size)
    left = js < 0
    right = js > 0
    pos[left] = (js[left] + 1) * d_m - delay_tau / 2
    pos[right] = (js[right] - 1) * d_m + delay_tau / 2
    return ChainLayout(pos, js, omega_a, order, d_m)


@dataclass
class ChainTrajectory:
    t_grid: np.ndarray
    amplitudes: np.ndarray  # (time, atom)
    indices: np.ndarray
    phase_l: int
    meta: dict[str, Any] = field(default_factory=dict)

    def atom(self, j: int) -> np.ndarray:
        hit = np.flatnonzero(self.indices == j)
        if hit.size != 1:
            raise ConfigurationError(f"no atom with index {j}")
        return self.amplitudes[:, hit[0]]

    def bright_mode(self) -> np.ndarray:
        """cm = (1/sqrt(2N)) sum_{j != 0} (-1)^{(j+1) l} c_j."""
        mirror = self.indices != 0
        signs = np.where(((self.indices + 1) * self.phase_l) % 2 == 0, 1.0, -1.0)
        n_mirror = int(np.count_nonzero(mirror))
        return (self.amplitudes[:, mirror] @ signs[mirror]) / math.sqrt(n_mirror)

    def as_cavity_trajectory(self) -> Trajectory:
        return Trajectory(self.t_grid, self.atom(0), self.bright_mode(), dict(self.meta))


def integrate_full_chain(
    positions: Sequence[float],
    phase_l: int,
    config: IntegratorConfig,
    *,
    omega_a: float,
    coupling: float = 1.0,
    env_rate: float = 0.0,
    t_eval: Any = None,
) -> ChainTrajectory:
    """
    Integrate all 2N+1 atom amplitudes with every pairwise retarded coupling.

    c_j' = -(coupling) sum_l e^{i omega_a D_jl} c_l(t - D_jl) H(t - D_jl) - (env_rate/2) c_j
    with D_jl = |x_j - x_l|; the l = j term is instantaneous. The atom at
    position 0 starts excited.

    Args:
        positions: Symmetric layout with one atom at 0 (see full_chain_layout)
        phase_l: Bragg order used for the bright-mode signs
        config: Horizon and step; dt must not exceed the shortest pairwise delay
        omega_a: Atomic frequency in units of gamma
        coupling: Scales every waveguide coupling (0 freezes the amplitudes)
        env_rate: gamma_0 / gamma
        t_eval: Output times; defaults to the step nodes
    """
    x = np.asarray(positions, dtype=float)
    m = x.size
    if m % 2 == 0 or m < 3:
        raise ConfigurationError("full chain needs 2N+1 atoms", atoms=m)
    centre = np.flatnonzero(np.abs(x) < 1e-15 * max(1.0, float(np.max(np.abs(x)))))
    if centre.size != 1 or centre[0] != m // 2:
        raise ConfigurationError("the middle atom must sit at position 0")
    if np.any(np.diff(x) <= 0):
        raise ConfigurationError("positions must be strictly increasing")

    delays = np.abs(x[:, None] - x[None, :])
    off = ~np.eye(m, dtype=bool)
    d_min = float(np.min(delays[off]))
    dt = config.dt if config.dt is not None else min(0.5 * d_min, 0.25 / m)
    if dt > d_min * (1 + 1e-12):
        raise ConfigurationError("dt must not exceed the shortest pairwise delay", dt=dt, d_min=d_min)
    n_steps = max(1, math.ceil(config.t_max / dt - 1e-9))

    weights = -coupling * np.exp(1j * omega_a * delays)
    weights[~off] = 0.0
    local = -(coupling + 0.5 * env_rate)
    rows, cols = np.nonzero(off)
    lag = delays[rows, cols]
    w_pairs = weights[rows, cols]

    y = np.zeros((n_steps + 1, m), dtype=complex)
    f = np.zeros((n_steps + 1, m), dtype=complex)
    y[0, m // 2] = 1.0

    def history(ts: float) -> np.ndarray:
        t_lag = ts - lag
        live = t_lag > 0
        out = np.zeros(lag.size, dtype=complex)
        if not np.any(live):
            return out
        tl = t_lag[live]
        idx = np.minimum((tl / dt).astype(int), n_steps - 1)
        s = tl / dt - idx
        c = cols[live]
        out[live] = _hermite(y[idx, c], y[idx + 1, c], f[idx, c], f[idx + 1, c], dt, s)
        return out

    def rhs(ts: float, state: np.ndarray) -> np.ndarray:
        coupled = np.zeros(m, dtype=complex)
        np.add.at(coupled, rows, w_pairs * history(ts))
        return local * state + coupled

    for i in range(n_steps):
        t0 = i * dt
        yi = y[i]
        k1 = rhs(t0, yi)
        f[i] = k1
        k2 = rhs(t0 + 0.5 * dt, yi + 0.5 * dt * k1)
        k3 = rhs(t0 + 0.5 * dt, yi + 0.5 * dt * k2)
        k4 = rhs(t0 + dt, yi + dt * k3)
        y[i + 1] = yi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y[i + 1])):
            raise NumericalFailure("non-finite state", time=(i + 1) * dt)
    f[n_steps] = rhs(n_steps * dt, y[n_steps])

    t_nodes = dt * np.arange(n_steps + 1)
    meta = {"method": "dde_full_chain", "dt": dt, "steps": n_steps, "atoms": m, "omega_a": omega_a}
    indices = np.arange(m) - m // 2
    if t_eval is None:
        return ChainTrajectory(t_nodes, y, indices, phase_l, meta)
    grid = as_time_grid(t_eval)
    if grid[-1] > t_nodes[-1] * (1 + 1e-12):
        raise ConfigurationError("t_eval beyond the integration horizon")
    spline = CubicHermiteSpline(t_nodes, y, f, axis=0)
    return ChainTrajectory(grid, spline(grid), indices, phase_l, meta)


__all__ = [
    "IntegratorConfig",
    "ChainLayout",
    "ChainTrajectory",
    "default_step",
    "integrate_cavity",
    "full_chain_layout",
    "integrate_full_chain",
]
