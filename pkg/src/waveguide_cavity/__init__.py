"""
Waveguide Cavity Dynamics

Excitation dynamics of a two-level atom between two atomic Bragg mirrors on a
one-dimensional waveguide, computed by delay-equation integration, an exact
inverse-Laplace series, pole/residue sums and closed-form approximations.
Version 0.1.0
"""

__version__ = "0.1.0"
__author__ = "Waveguide Cavity Dynamics Team"

from .analysis import OscillationFit, detect_kinks, fit_oscillation, trajectory_distance
from .dde_core import IntegratorConfig, integrate_cavity, integrate_full_chain
from .errors import CavityError, ConfigurationError, MethodValidityError, NumericalFailure
from .laplace_series import ExpPolynomial, RationalFunction, series_c0, term_fk
from .mirror_optics import AtomChain, ScatterResult, chain_scattering, lorentzian_reflectance
from .model import CavityParams, figures_of_merit, preset
from .spectral import PoleSet, macroscopic_c0, macroscopic_poles, main_poles_cubic, rabi_approx
from .trajectory import Trajectory

__all__ = [
    "AtomChain",
    "CavityError",
    "CavityParams",
    "ConfigurationError",
    "ExpPolynomial",
    "IntegratorConfig",
    "MethodValidityError",
    "NumericalFailure",
    "OscillationFit",
    "PoleSet",
    "RationalFunction",
    "ScatterResult",
    "Trajectory",
    "__version__",
    "chain_scattering",
    "detect_kinks",
    "figures_of_merit",
    "fit_oscillation",
    "integrate_cavity",
    "integrate_full_chain",
    "lorentzian_reflectance",
    "macroscopic_c0",
    "macroscopic_poles",
    "main_poles_cubic",
    "preset",
    "rabi_approx",
    "series_c0",
    "term_fk",
    "trajectory_distance",
]
