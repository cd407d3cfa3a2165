import os

import numpy as np

from waveguide_cavity.constants import DEFAULT_SEED, SEED_ENV


def default_seed() -> int:
    return int(os.getenv(SEED_ENV, str(DEFAULT_SEED)))


def resolve_seed(seed: int | None) -> int:
    return default_seed() if seed is None else int(seed)


def substream(seed: int, index: int) -> np.random.Generator:
    # Keyed by (seed, index) so ensemble members do not depend on evaluation order
    return np.random.default_rng([int(seed), int(index)])
