"""
Single-frequency reflectance of an atomic Bragg mirror.

Two routes are offered: the broadened Lorentzian closed form valid near
resonance and an exact composition of per-atom scattering matrices over
arbitrary positions, which also drives the positional-disorder ensemble.

Positions are in units of v_g/gamma and detunings in units of gamma, so the
propagation phase over a distance x at detuning delta is (omega_a + delta) * x.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import brentq
from scipy.stats import truncnorm

from .constants import DEFAULT_OMEGA_A, DISORDER_TRUNCATION, RESONANCE_DETUNING, TRANSFER_NORM_BOUND
from .errors import ConfigurationError, NumericalRangeError
from .utils.seeding import substream

logger = logging.getLogger(__name__)


def atom_amplitudes(delta: Any, gamma: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Single-atom reflection r = -1/(1 - i delta/gamma) and transmission t = 1 + r."""
    delta = np.asarray(delta, dtype=float)
    r = -1.0 / (1.0 - 1j * delta / gamma)
    return r, 1.0 + r


def lorentzian_reflectance(delta: Any, n_atoms: int) -> Any:
    """
    Near-resonance reflectance of an N-atom Bragg mirror, 1 / (1 + (delta/N)^2).

    Args:
        delta: Detuning in units of gamma (scalar or array)
        n_atoms: Mirror size N >= 1
    """
    if n_atoms < 1:
        raise ConfigurationError("n_atoms must be >= 1", n_atoms=n_atoms)
    value = 1.0 / (1.0 + (np.asarray(delta, dtype=float) / n_atoms) ** 2)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class AtomChain:
    """
    Atoms at fixed positions along the waveguide.

    Args:
        positions: Strictly increasing coordinates in units of v_g/gamma
        omega_a: Atomic transition frequency in units of gamma; sets the propagation phases
        gamma: Per-atom waveguide decay rate (1 internally)
    """

    positions: tuple[float, ...] = field(default_factory=tuple)
    omega_a: float = DEFAULT_OMEGA_A
    gamma: float = 1.0

    def __post_init__(self) -> None:
        pos = tuple(float(x) for x in self.positions)
        object.__setattr__(self, "positions", pos)
        if any(not math.isfinite(x) for x in pos):
            raise ConfigurationError("positions must be finite")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ConfigurationError("positions must be strictly increasing")
        if self.omega_a <= 0 or self.gamma <= 0:
            raise ConfigurationError("omega_a and gamma must be > 0")

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def spacing(self) -> float:
        if len(self.positions) < 2:
            return 0.0
        return (self.positions[-1] - self.positions[0]) / (len(self.positions) - 1)

    @classmethod
    def bragg(
        cls,
        n_atoms: int,
        omega_a: float = DEFAULT_OMEGA_A,
        order: int = 1,
        origin: float = 0.0,
    ) -> AtomChain:
        """Chain obeying the Bragg condition omega_a * spacing = order * pi."""
        if n_atoms < 0 or order < 1:
            raise ConfigurationError("n_atoms must be >= 0 and order >= 1")
        spacing = order * math.pi / omega_a
        return cls(tuple(origin + spacing * np.arange(n_atoms)), omega_a=omega_a)

    def shifted(self, offset: float) -> AtomChain:
        return AtomChain(tuple(x + offset for x in self.positions), self.omega_a, self.gamma)


@dataclass(frozen=True)
class ScatterResult:
    r: complex
    t: complex

    @property
    def reflectance(self) -> float:
        return abs(self.r) ** 2

    @property
    def transmittance(self) -> float:
        return abs(self.t) ** 2


def _chain_amplitudes(
    chain: AtomChain, delta: np.ndarray, norm_bound: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Batched scattering amplitudes (left-incidence r, t) of a chain.

    Atoms are added one at a time with the Redheffer star product of the
    accumulated (r_left, r_right, t) and the next atom's scattering matrix;
    every entry stays bounded by one.
    """
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    r_out = np.zeros(delta.shape, dtype=complex)
    t_out = np.ones(delta.shape, dtype=complex)
    if not chain.positions:
        return r_out, t_out

    k = chain.omega_a + delta
    x = np.asarray(chain.positions)

    # At resonance t = 0 and the first atom reflects everything
    resonant = np.abs(delta) <= RESONANCE_DETUNING * chain.gamma
    if np.any(resonant):
        r_out[resonant] = -np.exp(2j * k[resonant] * x[0])
        t_out[resonant] = 0.0
    live = ~resonant
    if not np.any(live):
        return r_out, t_out

    kl = k[live]
    r_atom, t_atom = atom_amplitudes(delta[live], chain.gamma)
    r_left = r_atom * np.exp(2j * kl * x[0])
    r_right = r_atom * np.exp(-2j * kl * x[0])
    t_total = t_atom.copy()
    for index, xj in enumerate(x[1:], start=1):
        phase = np.exp(2j * kl * xj)
        rl_atom = r_atom * phase
        rr_atom = r_atom / phase
        denom = 1.0 - r_right * rl_atom
        gain = np.abs(denom) * norm_bound
        if np.any(gain <= 1.0):
            worst = int(np.argmin(gain))
            raise NumericalRangeError(
                "multiple-reflection gain exceeded bound",
                atom_index=index,
                delta=float(delta[live][worst]),
                gain=float(1.0 / max(abs(denom[worst]), 1e-300)),
                bound=norm_bound,
            )
        r_left = r_left + t_total**2 * rl_atom / denom
        r_right = rr_atom + t_atom**2 * r_right / denom
        t_total = t_total * t_atom / denom

    r_out[live] = r_left
    t_out[live] = t_total
    return r_out, t_out


def chain_scattering(
    chain: AtomChain, delta: float, norm_bound: float = TRANSFER_NORM_BOUND
) -> ScatterResult:
    """
    Reflection and transmission amplitudes of a chain at one detuning.

    Raises:
        NumericalRangeError: if the multiple-reflection gain 1/|1 - r_right r_atom|
            of any step exceeds ``norm_bound``
    """
    r, t = _chain_amplitudes(chain, np.array([delta], dtype=float), norm_bound)
    return ScatterResult(complex(r[0]), complex(t[0]))


def reflectance_spectrum(
    chain: AtomChain, delta_grid: Any, norm_bound: float = TRANSFER_NORM_BOUND
) -> np.ndarray:
    r, _ = _chain_amplitudes(chain, np.asarray(delta_grid, dtype=float), norm_bound)
    return np.abs(r) ** 2


def half_width(chain: AtomChain, upper: float | None = None) -> float:
    """Positive detuning where the reflectance drops to half its resonant value."""
    if not chain.positions:
        raise ConfigurationError("half_width needs at least one atom")
    peak = reflectance_spectrum(chain, [0.0])[0]
    hi = upper if upper is not None else 10.0 * len(chain) + 10.0

    def excess(d: float) -> float:
        return float(reflectance_spectrum(chain, [d])[0]) - 0.5 * peak

    lo = 1e-6 * hi
    return float(brentq(excess, lo, hi, xtol=1e-10))


@dataclass(frozen=True)
class DisorderResult:
    delta_grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    samples: int
    sigma: float
    seed: int
    averaging: str = "intensity"

    def meta(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "sigma": self.sigma,
            "seed": self.seed,
            "averaging": self.averaging,
        }


def disorder_averaged_reflectance(
    n_atoms: int,
    spacing: float,
    sigma: float,
    delta_grid: Any,
    samples: int,
    seed: int,
    omega_a: float | None = None,
    norm_bound: float = TRANSFER_NORM_BOUND,
) -> DisorderResult:
    """
    Intensity-averaged reflectance of a Bragg chain with Gaussian position noise.

    Args:
        n_atoms: Chain length
        spacing: Mean spacing d_m in units of v_g/gamma
        sigma: RMS displacement as a fraction of d_m; draws truncated at +/-4 sigma
        delta_grid: Detunings in units of gamma
        samples: Ensemble size
        seed: Base seed; sample i uses the substream (seed, i)
        omega_a: Atomic frequency; defaults to the first-order Bragg value pi / spacing

    Returns:
        DisorderResult with mean and standard error per detuning
    """
    if sigma < 0:
        raise ConfigurationError("sigma must be >= 0", sigma=sigma)
    if samples < 1:
        raise ConfigurationError("samples must be >= 1", samples=samples)
    if spacing <= 0:
        raise ConfigurationError("spacing must be > 0", spacing=spacing)
    if DISORDER_TRUNCATION * sigma >= 0.5:
        raise ConfigurationError(
            "sigma too large: truncated draws could reorder atoms", sigma=sigma
        )
    omega = math.pi / spacing if omega_a is None else omega_a
    grid = np.asarray(delta_grid, dtype=float)
    base = spacing * np.arange(n_atoms)
    draws = np.empty((samples, grid.size))

    for i in range(samples):
        if sigma > 0:
            noise = truncnorm.rvs(
                -DISORDER_TRUNCATION,
                DISORDER_TRUNCATION,
                scale=sigma * spacing,
                size=n_atoms,
                random_state=substream(seed, i),
            )
        else:
            noise = np.zeros(n_atoms)
        chain = AtomChain(tuple(base + noise), omega_a=omega)
        try:
            draws[i] = reflectance_spectrum(chain, grid, norm_bound)
        except NumericalRangeError as exc:
            raise NumericalRangeError(exc.message, sample_index=i, **exc.details) from exc
        if i and i % 100 == 0:
            logger.debug("disorder ensemble: %d/%d samples", i, samples)

    mean = draws.mean(axis=0)
    if samples > 1:
        stderr = draws.std(axis=0, ddof=1) / math.sqrt(samples)
    else:
        stderr = np.zeros_like(mean)
    return DisorderResult(grid, mean, stderr, samples, sigma, seed)


__all__ = [
    "AtomChain",
    "ScatterResult",
    "DisorderResult",
    "atom_amplitudes",
    "lorentzian_reflectance",
    "chain_scattering",
    "reflectance_spectrum",
    "half_width",
    "disorder_averaged_reflectance",
]
