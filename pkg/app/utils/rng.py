"""
Seeded random streams.

Draw i of a run is a pure function of (seed, i): numpy seeds a fresh PCG64
generator from the pair, so samples can be produced in any order or on any
worker and still reproduce.
"""

import numpy as np


def generator(seed: int, index: int = 0) -> np.random.Generator:
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return np.random.default_rng([seed, index])
