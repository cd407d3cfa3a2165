"""
Parameter space of the atomic-mirror cavity.

This module provides:
- CavityParams: validated value type (N, tau, phi, gamma_0) in units of gamma
- DerivedGroups and FiguresOfMerit computed from it
- Platform presets (cesium, quantum dot, superconducting) with a tau consistency gate
- Regime classification on a = N * tau
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any

from .constants import (
    FREQUENCY_CONVENTION,
    MACROSCOPIC_MIN_A,
    MARKOV_MAX_A,
    PLATFORM_TABLE,
    SPEED_OF_LIGHT,
)
from .errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CavityParams:
    """
    Central atom between two atomic Bragg mirrors of N atoms each.

    Args:
        n_atoms: Atoms per mirror (N >= 1)
        delay_tau: One-way delay gamma * d / v_g (> 0)
        phase_offset: phi in theta = (2n+1)pi + phi, |phi| < pi
        env_rate: Emission rate into non-guided modes, gamma_0 / gamma (>= 0)
        gamma: Single-atom waveguide decay rate in physical units; all solver
            quantities are already normalized by it
    """

    n_atoms: int
    delay_tau: float
    phase_offset: float = 0.0
    env_rate: float = 0.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise ConfigurationError("n_atoms must be an integer", n_atoms=self.n_atoms)
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        if self.n_atoms < 1:
            raise ConfigurationError("n_atoms must be >= 1", n_atoms=self.n_atoms)
        if not math.isfinite(self.delay_tau) or self.delay_tau <= 0:
            raise ConfigurationError("delay_tau must be finite and > 0", delay_tau=self.delay_tau)
        if not math.isfinite(self.phase_offset) or abs(self.phase_offset) >= math.pi:
            raise ConfigurationError(
                "phase_offset must satisfy |phi| < pi", phase_offset=self.phase_offset
            )
        if not math.isfinite(self.env_rate) or self.env_rate < 0:
            raise ConfigurationError("env_rate must be finite and >= 0", env_rate=self.env_rate)
        if not math.isfinite(self.gamma) or self.gamma <= 0:
            raise ConfigurationError("gamma must be finite and > 0", gamma=self.gamma)
        if not math.isfinite(self.n_atoms * self.delay_tau):
            raise ConfigurationError("a = N * tau overflows")

    @property
    def a(self) -> float:
        return self.n_atoms * self.delay_tau

    @property
    def detuning(self) -> float:
        return self.phase_offset / self.delay_tau

    def replace(self, **changes: Any) -> CavityParams:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_physical(
        cls,
        gamma_hz: float,
        d_m: float,
        vg_over_c: float,
        n_atoms: int,
        phase_offset: float = 0.0,
        env_rate: float = 0.0,
    ) -> CavityParams:
        """
        Build params from a physical decay rate (1/s), separation (m) and group velocity.

        Returns:
            CavityParams with delay_tau = gamma * d / v_g
        """
        if gamma_hz <= 0 or d_m <= 0 or vg_over_c <= 0:
            raise ConfigurationError(
                "gamma_hz, d_m and vg_over_c must be > 0",
                gamma_hz=gamma_hz,
                d_m=d_m,
                vg_over_c=vg_over_c,
            )
        tau = gamma_hz * d_m / (vg_over_c * SPEED_OF_LIGHT)
        return cls(
            n_atoms=n_atoms,
            delay_tau=tau,
            phase_offset=phase_offset,
            env_rate=env_rate,
            gamma=gamma_hz,
        )


@dataclass(frozen=True)
class DerivedGroups:
    a: float
    detuning: float
    half_trip: float
    round_trip: float


@dataclass(frozen=True)
class FiguresOfMerit:
    """Analytic figures of merit, all rates in units of gamma."""

    kappa: float
    rabi_freq: float
    critical_n: float
    critical_n_rounded: int
    cooperativity: float
    cycles_ratio: float

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def derive_groups(params: CavityParams) -> DerivedGroups:
    return DerivedGroups(
        a=params.n_atoms * params.delay_tau,
        detuning=params.phase_offset / params.delay_tau,
        half_trip=params.delay_tau / 2.0,
        round_trip=params.delay_tau,
    )


def figures_of_merit(params: CavityParams) -> FiguresOfMerit:
    """
    Cavity loss rate, vacuum Rabi frequency and the loss figures of merit.

    Args:
        params: Cavity parameters

    Returns:
        FiguresOfMerit; cooperativity is ``inf`` when env_rate is zero
    """
    a = params.a
    kappa = 1.0 / (1.0 + a) ** 2
    rabi = math.sqrt(2.0 * params.n_atoms / (1.0 + a))
    critical = 1.0 / params.delay_tau
    if params.env_rate > 0:
        cooperativity = 2.0 * params.n_atoms * (1.0 + a) / params.env_rate
    else:
        cooperativity = math.inf
    return FiguresOfMerit(
        kappa=kappa,
        rabi_freq=rabi,
        critical_n=critical,
        critical_n_rounded=int(round(critical)),
        cooperativity=cooperativity,
        cycles_ratio=rabi / (kappa + params.env_rate),
    )


def classify_regime(a: float) -> str:
    if a < MARKOV_MAX_A:
        return "markovian"
    if a <= MACROSCOPIC_MIN_A:
        return "transition"
    return "macroscopic"


@dataclass(frozen=True)
class PlatformPreset:
    """
    One row of the experimental platform table.

    Frequencies are ordinary frequencies; ``two_gamma_mhz`` is 2*gamma and
    ``gamma_ratio`` is 2*gamma/gamma_0.
    """

    label: str
    omega_a_ghz: float
    two_gamma_mhz: float
    gamma_ratio: float
    vg_over_c: float
    d_mm: float
    tau: float

    @property
    def env_rate(self) -> float:
        """gamma_0 / gamma."""
        return 2.0 / self.gamma_ratio

    @property
    def critical_n(self) -> float:
        return 1.0 / self.tau

    def recomputed_tau(self) -> float:
        gamma = self.two_gamma_mhz / 2.0 * 1.0e6
        return gamma * (self.d_mm * 1.0e-3) / (self.vg_over_c * SPEED_OF_LIGHT)

    def tau_deviation(self) -> float:
        return abs(self.recomputed_tau() - self.tau) / self.tau

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def params(self, n_atoms: int | None = None, phase_offset: float = 0.0) -> CavityParams:
        n = int(round(self.critical_n)) if n_atoms is None else n_atoms
        return CavityParams(
            n_atoms=n,
            delay_tau=self.tau,
            phase_offset=phase_offset,
            env_rate=self.env_rate,
        )


PRESETS: dict[str, PlatformPreset] = {
    row[0]: PlatformPreset(*row) for row in PLATFORM_TABLE
}


def preset(
    label: str,
    n_atoms: int | None = None,
    gamma_ratio: float | None = None,
) -> tuple[PlatformPreset, CavityParams]:
    """
    Look up a platform preset and build its cavity parameters.

    Args:
        label: One of ``cesium``, ``quantum_dot``, ``superconducting``
        n_atoms: Atoms per mirror; defaults to the rounded critical size
        gamma_ratio: Override of 2*gamma/gamma_0 (the superconducting row is a lower bound)

    Returns:
        (preset, params)
    """
    key = label.strip().lower()
    if key not in PRESETS:
        raise ConfigurationError(
            f"Unknown preset: {label}", known=sorted(PRESETS)
        )
    row = PRESETS[key]
    if gamma_ratio is not None:
        if gamma_ratio <= 0:
            raise ConfigurationError("gamma_ratio must be > 0", gamma_ratio=gamma_ratio)
        row = dataclasses.replace(row, gamma_ratio=gamma_ratio)
    if row.tau_deviation() > 0.1:
        logger.warning(
            "Preset %s: recomputed tau %.3g deviates %.1f%% from table value %.3g",
            row.label,
            row.recomputed_tau(),
            100 * row.tau_deviation(),
            row.tau,
        )
    return row, row.params(n_atoms)


def presets_document() -> list[dict[str, Any]]:
    """JSON-ready preset rows, one per platform, with exactly the table columns."""
    return [row.to_dict() for row in PRESETS.values()]


def presets_consistency() -> dict[str, Any]:
    """Recomputed tau per preset, its relative deviation and the 10% gate verdict."""
    return {
        "frequency_convention": FREQUENCY_CONVENTION,
        "presets": {
            row.label: {
                "recomputed_tau": row.recomputed_tau(),
                "relative_deviation": row.tau_deviation(),
                "within_gate": row.tau_deviation() <= 0.1,
            }
            for row in PRESETS.values()
        },
    }


__all__ = [
    "CavityParams",
    "DerivedGroups",
    "FiguresOfMerit",
    "PlatformPreset",
    "PRESETS",
    "derive_groups",
    "figures_of_merit",
    "classify_regime",
    "preset",
    "presets_document",
    "presets_consistency",
]
