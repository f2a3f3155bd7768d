"""Seeded random streams.

Every consumer of randomness draws from its own ``numpy`` PCG64 generator derived
from ``SeedSequence(seed, spawn_key=(stream,))``. Streams are plain integers so a
run can be reproduced on any platform from ``(seed, stream)`` alone.
"""

import numpy as np

# Stream ids
STREAM_WORKSPACE = 0
STREAM_PARTICLE_BASE = 1000

SEED_MAX = 2**64 - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return the generator for ``stream`` of ``seed``."""
    if seed < 0 or seed > SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(sequence))


def particle_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """One independent stream per particle, in particle order."""
    return [make_rng(seed, STREAM_PARTICLE_BASE + index) for index in range(count)]


def run_seed(base_seed: int, index: int) -> int:
    """Seed of Monte Carlo run ``index``."""
    return (base_seed ^ index) & SEED_MAX
