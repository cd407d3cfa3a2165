"""
Pole-based solutions for the cavity amplitude.

This module provides:
- Macroscopic-limit (N -> infinity) poles s_j = i y_j of the transform, one per
  branch of y = cot((y - Delta) tau / 2), found by bracketing and Newton polish
- Residue summation c0 = sum_j w_j e^{i y_j t} with w_j = 1 / (1 + tau/2 + tau y_j^2 / 2)
- Finite-N main poles from the cubic obtained by expanding e^{-s tau} to second order
- Closed-form approximations: vacuum Rabi, detuned general and Markov solutions
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import bisect, brentq, newton

from .constants import DEFAULT_POLE_COUNT, SMALL_DELAY_MAX_TAU
from .errors import ConfigurationError, DegenerateParametersError, RootFindingError
from .model import CavityParams, figures_of_merit
from .trajectory import Trajectory, as_time_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoleSet:
    """
    Purely imaginary poles s_j = i y_j with residue weights.

    ``offsets`` keeps each root's reduced argument eps = (y - Delta) tau / 2
    modulo pi, so residuals can be evaluated without the cancellation of cot
    at large |y|.
    """

    poles: np.ndarray
    weights: np.ndarray
    indices: np.ndarray
    offsets: np.ndarray
    tau: float
    detuning: float
    tail_bound: float = field(default=0.0)

    def __len__(self) -> int:
        return int(self.poles.size)

    @property
    def frequencies(self) -> np.ndarray:
        return self.poles.imag

    def main_pair(self) -> tuple[complex, complex]:
        plus = self.poles[self.indices == 1]
        minus = self.poles[self.indices == -1]
        return complex(plus[0]), complex(minus[0])

    def residuals(self) -> np.ndarray:
        """|y - cot((y - Delta) tau / 2)| / |y| per pole."""
        y = self.frequencies
        return np.abs(y - 1.0 / np.tan(self.offsets)) / np.abs(y)

    def contributions(self, t: Any) -> np.ndarray:
        """Per-pole terms w_j e^{s_j t}, shape (time, pole)."""
        grid = np.atleast_1d(np.asarray(t, dtype=float))
        return self.weights[None, :] * np.exp(np.outer(grid, self.poles))

    def evaluate(self, t: Any) -> np.ndarray:
        return self.contributions(t).sum(axis=1)


def pole_tail_bound(tau: float) -> float:
    """Bound tau/6 on the summed magnitude of all non-main pole contributions."""
    if tau <= 0:
        raise ConfigurationError("tau must be > 0", tau=tau)
    return tau / 6.0


def _branch_root(k: int, tau: float, detuning: float) -> float:
    """Reduced argument eps in (0, pi) solving Delta + 2(k pi + eps)/tau = cot(eps)."""
    base = detuning + 2.0 * k * math.pi / tau
    slope = 2.0 / tau

    def bracket_fn(eps: float) -> float:
        return (base + slope * eps) * math.sin(eps) - math.cos(eps)

    def h(eps: float) -> float:
        return base + slope * eps - 1.0 / math.tan(eps)

    def dh(eps: float) -> float:
        return slope + 1.0 / math.sin(eps) ** 2

    try:
        eps0 = bisect(bracket_fn, 0.0, math.pi, xtol=1e-14, rtol=1e-6)
    except ValueError as exc:
        raise RootFindingError("cotangent branch could not be bracketed", branch=k) from exc

    try:
        eps = float(newton(h, eps0, fprime=dh, tol=1e-15 * eps0, rtol=1e-13, maxiter=50))
    except (RuntimeError, ZeroDivisionError, OverflowError):
        eps = math.nan
    y = base + slope * eps if math.isfinite(eps) else math.nan
    if not (0.0 < eps < math.pi) or abs(h(eps)) > 1e-12 * max(1.0, abs(y)):
        logger.debug("branch %d: Newton polish rejected, refining by brentq", k)
        try:
            eps = brentq(bracket_fn, 0.0, math.pi, xtol=1e-15 * eps0, rtol=1e-15, maxiter=500)
        except ValueError as exc:
            raise RootFindingError("cotangent branch refinement failed", branch=k) from exc
    return eps


def macroscopic_poles(
    tau: float, detuning: float = 0.0, count: int = DEFAULT_POLE_COUNT
) -> PoleSet:
    """
    The 2*count poles nearest the origin in the N -> infinity limit.

    Branch j >= 1 lives on (y - Delta) tau/2 in ((j-1) pi, j pi), branch
    j <= -1 on (j pi, (j+1) pi). At zero detuning the negative branch is the
    exact mirror image of the positive one.

    Raises:
        RootFindingError: if a branch cannot be bracketed, with the branch index
    """
    if tau <= 0 or not math.isfinite(tau):
        raise ConfigurationError("tau must be finite and > 0", tau=tau)
    if count < 2:
        raise ConfigurationError("count must be >= 2", count=count)

    slope = 2.0 / tau
    labels: list[int] = []
    ys: list[float] = []
    offs: list[float] = []
    for j in range(1, count + 1):
        k = j - 1
        eps = _branch_root(k, tau, detuning)
        y_plus = detuning + 2.0 * k * math.pi / tau + slope * eps
        if detuning == 0.0:
            eps_minus = -eps
            y_minus = -y_plus
        else:
            eps_minus = _branch_root(-j, tau, detuning)
            y_minus = detuning - 2.0 * j * math.pi / tau + slope * eps_minus
        labels += [j, -j]
        ys += [y_plus, y_minus]
        offs += [eps, eps_minus]

    y = np.asarray(ys)
    order = np.argsort(np.abs(y), kind="stable")
    y = y[order]
    weights = 1.0 / (1.0 + tau / 2.0 + tau / 2.0 * y**2)
    return PoleSet(
        poles=1j * y,
        weights=weights.astype(complex),
        indices=np.asarray(labels)[order],
        offsets=np.asarray(offs)[order],
        tau=tau,
        detuning=detuning,
        tail_bound=pole_tail_bound(tau),
    )


def macroscopic_c0(
    tau: float,
    detuning: float,
    t_grid: Any,
    count: int = DEFAULT_POLE_COUNT,
) -> Trajectory:
    """Residue sum over ``macroscopic_poles``; meta carries the error bounds."""
    grid = as_time_grid(t_grid)
    poles = macroscopic_poles(tau, detuning, count)
    c0 = poles.evaluate(grid)
    # omitted branches |j| > count contribute at most tau / (pi^2 (count - 1))
    truncation = tau / (math.pi**2 * (count - 1))
    meta = {
        "method": "spectral",
        "pole_count": count,
        "tail_bound": poles.tail_bound,
        "truncation_bound": truncation,
        "error_bound": poles.tail_bound,
        "param_delay_tau": tau,
        "param_detuning": detuning,
    }
    return Trajectory(grid, c0, None, meta)


@dataclass(frozen=True)
class MainPoles:
    s_plus: complex
    s_minus: complex
    residue_plus: complex
    residue_minus: complex
    spurious: complex

    @property
    def splitting(self) -> float:
        return abs(self.s_plus.imag - self.s_minus.imag)


def _cubic_coefficients(params: CavityParams) -> tuple[np.ndarray, np.ndarray]:
    """Descending coefficients of the expanded denominator D and numerator Num in s' = s + gamma_0/2."""
    n = params.n_atoms
    tau = params.delay_tau
    w = cmath.exp(1j * params.phase_offset)
    den = np.array(
        [
            -w * n * tau**2 / 2.0,
            1.0 + w * n * (tau + tau**2 / 2.0),
            n + 1.0 - w * n * (1.0 + tau),
            n * (1.0 + w),
        ],
        dtype=complex,
    )
    num = np.array([-w * n * tau**2 / 2.0, 1.0 + w * n * tau, n * (1.0 - w)], dtype=complex)
    return den, num


def main_poles_cubic(params: CavityParams) -> MainPoles:
    """
    The two main poles of the transform with e^{-s tau} expanded to second order.

    The pair is the assignment of two cubic roots closest to +/- i sqrt(2N/(1+a))
    (shifted by -gamma_0/2); the remaining root is reported as spurious.

    Only meant for phi = 0. With detuning the expansion can place a main pole
    in the right half-plane (N=5000, tau=0.02, phi=pi/10 gives Re s+ ~ +0.12);
    a warning is logged and detuned_general_c0 or the DDE should be used.

    Raises:
        DegenerateParametersError: if two assignments are equally close
    """
    if params.phase_offset != 0.0:
        logger.warning(
            "main_poles_cubic assumes phi = 0; got phi=%g, poles may grow", params.phase_offset
        )
    den, num = _cubic_coefficients(params)
    roots = np.roots(den)
    if roots.size != 3 or not np.all(np.isfinite(roots)):
        raise DegenerateParametersError("cubic does not have three finite roots")
    target = figures_of_merit(params).rabi_freq

    costs = []
    for drop in range(3):
        pair = [roots[i] for i in range(3) if i != drop]
        hi, lo = sorted(pair, key=lambda r: r.imag, reverse=True)
        cost = abs(hi - 1j * target) + abs(lo + 1j * target)
        costs.append((cost, -abs(hi.imag) - abs(lo.imag), drop, hi, lo))
    costs.sort(key=lambda c: (c[0], c[1]))
    best, second = costs[0], costs[1]
    if abs(second[0] - best[0]) <= 1e-9 * max(1.0, best[0]) and abs(second[1] - best[1]) <= 1e-9 * target:
        raise DegenerateParametersError(
            "main-pole selection is ambiguous", n_atoms=params.n_atoms, delay_tau=params.delay_tau
        )
    _, _, drop, hi, lo = best
    dprime = np.polyder(den)

    def residue(s: complex) -> complex:
        return complex(np.polyval(num, s) / np.polyval(dprime, s))

    shift = 0.5 * params.env_rate
    return MainPoles(
        s_plus=complex(hi) - shift,
        s_minus=complex(lo) - shift,
        residue_plus=residue(hi),
        residue_minus=residue(lo),
        spurious=complex(roots[drop]) - shift,
    )


def main_pole_c0(params: CavityParams, t_grid: Any) -> Trajectory:
    """Two-term residue sum at the cubic main poles."""
    grid = as_time_grid(t_grid)
    poles = main_poles_cubic(params)
    c0 = poles.residue_plus * np.exp(poles.s_plus * grid) + poles.residue_minus * np.exp(
        poles.s_minus * grid
    )
    meta = {
        "method": "main",
        "s_plus": [poles.s_plus.real, poles.s_plus.imag],
        "s_minus": [poles.s_minus.real, poles.s_minus.imag],
        **{f"param_{k}": v for k, v in params.to_dict().items()},
    }
    return Trajectory(grid, c0, None, meta)


def _warn_small_delay_regime(params: CavityParams, method: str) -> None:
    if params.delay_tau > SMALL_DELAY_MAX_TAU or params.n_atoms < 10:
        logger.warning(
            "%s assumes tau << 1 << N; got tau=%g, N=%d", method, params.delay_tau, params.n_atoms
        )


def rabi_approx(params: CavityParams, t_grid: Any) -> Trajectory:
    """
    Damped vacuum Rabi oscillation e^{-(kappa + gamma_0) t / 2} cos(sqrt(2N/(1+a)) t).
    """
    grid = as_time_grid(t_grid)
    _warn_small_delay_regime(params, "rabi_approx")
    fom = figures_of_merit(params)
    c0 = np.exp(-0.5 * (fom.kappa + params.env_rate) * grid) * np.cos(fom.rabi_freq * grid)
    meta = {
        "method": "approx",
        "kappa": fom.kappa,
        "rabi_freq": fom.rabi_freq,
        **{f"param_{k}": v for k, v in params.to_dict().items()},
    }
    return Trajectory(grid, c0.astype(complex), None, meta)


def detuned_general_c0(params: CavityParams, t_grid: Any) -> Trajectory:
    """
    Closed form for a detuned atom at arbitrary a = N tau (small tau).

    c0 = e^{-t/(2(1+a)^2)} e^{2a(1+a) v t / (3 tau)}
         [cos(W0 sqrt(1+u+v) t) + sqrt(-u/(1+u+v)) sin(W0 sqrt(1+u+v) t)]

    with W0 = sqrt(2a/((1+a) tau)), v = (3/4)(e^{i phi/(1+a)^2} - 1) and
    u = -2a(1+a)^3 v^2 / (9 tau); environment loss multiplies by e^{-gamma_0 t/2}.
    """
    grid = as_time_grid(t_grid)
    _warn_small_delay_regime(params, "detuned_general_c0")
    a = params.a
    tau = params.delay_tau
    omega0 = math.sqrt(2.0 * a / ((a + 1.0) * tau))
    v = 0.75 * (cmath.exp(1j * params.phase_offset / (1.0 + a) ** 2) - 1.0)
    u = -2.0 * a * (1.0 + a) ** 3 * v**2 / (9.0 * tau)
    root = cmath.sqrt(1.0 + u + v)
    mix = cmath.sqrt(-u / (1.0 + u + v))
    phase = omega0 * root * grid
    envelope = np.exp(-grid / (2.0 * (a + 1.0) ** 2)) * np.exp(2.0 * a * (a + 1.0) * v * grid / (3.0 * tau))
    c0 = envelope * (np.cos(phase) + mix * np.sin(phase)) * np.exp(-0.5 * params.env_rate * grid)
    meta = {
        "method": "detuned",
        "omega0": omega0,
        "u": [u.real, u.imag],
        "v": [v.real, v.imag],
        **{f"param_{k}": val for k, val in params.to_dict().items()},
    }
    return Trajectory(grid, c0, None, meta)


def generalized_rabi(tau: float, detuning: float) -> float:
    """sqrt(Omega_0^2 + (Delta/2)^2) with Omega_0 = sqrt(2/tau)."""
    if tau <= 0:
        raise ConfigurationError("tau must be > 0", tau=tau)
    return math.sqrt(2.0 / tau + 0.25 * detuning**2)


def detuned_macroscopic_amplitude(tau: float, detuning: float, t: Any) -> np.ndarray:
    """e^{i Delta t/2} (cos(Omega t) - i (Delta / 2 Omega) sin(Omega t))."""
    grid = np.asarray(t, dtype=float)
    omega = generalized_rabi(tau, detuning)
    return np.exp(0.5j * detuning * grid) * (
        np.cos(omega * grid) - 0.5j * detuning / omega * np.sin(omega * grid)
    )


def detuned_probability(delta: float, omega0: float, t: Any) -> Any:
    """
    |c0|^2 of the detuned macroscopic amplitude:
    (cos^2(Omega t) + (Delta / 2 Omega_0)^2) / (1 + (Delta / 2 Omega_0)^2).
    """
    if omega0 <= 0:
        raise ConfigurationError("omega0 must be > 0", omega0=omega0)
    omega = math.sqrt(omega0**2 + 0.25 * delta**2)
    ratio = (0.5 * delta / omega0) ** 2
    value = (np.cos(omega * np.asarray(t, dtype=float)) ** 2 + ratio) / (1.0 + ratio)
    return float(value) if np.ndim(value) == 0 else value


def markov_c0(params: CavityParams, t_grid: Any) -> Trajectory:
    """
    Exact solution with both delays set to zero.

    c0~(s') = (s' + N(1 - W)) / (s'^2 + s'(1 + N(1 - W)) + N(1 + W)), s' = s + gamma_0/2,
    which at phi = 0 gives e^{-t/2}(cos wt - sin(wt)/(2w)), w = sqrt(2N - 1/4).
    """
    grid = as_time_grid(t_grid)
    n = params.n_atoms
    w = cmath.exp(1j * params.phase_offset)
    b = 1.0 + n * (1.0 - w)
    c = n * (1.0 + w)
    disc = cmath.sqrt(b * b - 4.0 * c)
    p1 = 0.5 * (-b + disc)
    p2 = 0.5 * (-b - disc)
    zero = n * (1.0 - w)
    if abs(p1 - p2) <= 1e-12 * max(1.0, abs(p1)):
        # double pole
        c0 = (1.0 + (p1 + zero) * grid) * np.exp(p1 * grid)
    else:
        c0 = (p1 + zero) / (p1 - p2) * np.exp(p1 * grid) + (p2 + zero) / (p2 - p1) * np.exp(p2 * grid)
    c0 = c0 * np.exp(-0.5 * params.env_rate * grid)
    meta = {"method": "markov", **{f"param_{k}": v for k, v in params.to_dict().items()}}
    return Trajectory(grid, c0, None, meta)


__all__ = [
    "PoleSet",
    "MainPoles",
    "pole_tail_bound",
    "macroscopic_poles",
    "macroscopic_c0",
    "main_poles_cubic",
    "main_pole_c0",
    "rabi_approx",
    "detuned_general_c0",
    "generalized_rabi",
    "detuned_macroscopic_amplitude",
    "detuned_probability",
    "markov_c0",
]
