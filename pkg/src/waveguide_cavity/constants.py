"""Global constants for the cavity package.

Internal units: the single-atom waveguide decay rate is 1, times are in units
of 1/gamma and atomic positions in units of v_g/gamma. Physical units only
appear in platform presets and config documents.
"""

from decimal import getcontext
from pathlib import Path

# Default Decimal context; the series code raises it locally per term
getcontext().prec = 64

_HERE = Path(__file__).resolve()
_ROOT = _HERE.parents[2]  # repo root
RECIPES_DIR = _ROOT / "config" / "recipes"

SPEED_OF_LIGHT = 2.998e8  # m/s

# Environment variable consulted for the default random seed
SEED_ENV = "WAVEGUIDE_CAVITY_SEED"
DEFAULT_SEED = 1337

# Laplace series limits
K_LIMIT = 300
K_LIMIT_EXTENDED = 3000
DOUBLE_EVAL_MAX_K = 8

# Spectral defaults
DEFAULT_POLE_COUNT = 64

# Mirror optics
DEFAULT_OMEGA_A = 1.0e6  # atomic frequency in units of gamma
TRANSFER_NORM_BOUND = 1.0e12
RESONANCE_DETUNING = 1.0e-10  # |delta| / gamma treated as exact resonance
DISORDER_TRUNCATION = 4.0  # truncated Gaussian cut at +/- this many sigma

# Output
MAX_OUTPUT_ROWS = 100_000
DEFAULT_POINTS = 2001

# Regime boundaries on a = N * tau
MARKOV_MAX_A = 0.1
MACROSCOPIC_MIN_A = 10.0

# Cross-method tolerances (sup-norm on complex c0)
REGIME_TOLERANCES = {
    "markovian": 0.05,
    "transition": 0.03,
    "macroscopic": 0.02,  # plus tau / 6
}
EXACT_PAIR_TOLERANCE = 1.0e-5

# Closed-form main-pole and approximate formulas only hold for tau <= this
SMALL_DELAY_MAX_TAU = 0.1

# Platform table: omega_a [GHz], 2*gamma [MHz], 2*gamma/gamma_0, v_g/c, d [mm], tau.
# Frequencies are read as ordinary frequencies (MHz -> 1e6 per second).
PLATFORM_TABLE = (
    ("cesium", 2.1e6, 32.0, 1.1, 0.1, 1.0, 5.3e-4),
    ("quantum_dot", 2.0e6, 6.2e3, 63.0, 0.01, 1.0e-2, 1.0e-2),
    ("superconducting", 7.1, 6.0e2, 20.0, 0.5, 10.0, 2.0e-2),
)
FREQUENCY_CONVENTION = "ordinary"

__all__ = [
    "RECIPES_DIR",
    "SPEED_OF_LIGHT",
    "SEED_ENV",
    "DEFAULT_SEED",
    "K_LIMIT",
    "K_LIMIT_EXTENDED",
    "DOUBLE_EVAL_MAX_K",
    "DEFAULT_POLE_COUNT",
    "DEFAULT_OMEGA_A",
    "TRANSFER_NORM_BOUND",
    "RESONANCE_DETUNING",
    "DISORDER_TRUNCATION",
    "MAX_OUTPUT_ROWS",
    "DEFAULT_POINTS",
    "MARKOV_MAX_A",
    "MACROSCOPIC_MIN_A",
    "REGIME_TOLERANCES",
    "EXACT_PAIR_TOLERANCE",
    "SMALL_DELAY_MAX_TAU",
    "PLATFORM_TABLE",
    "FREQUENCY_CONVENTION",
]
