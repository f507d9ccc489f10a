"""
Deterministic RNG streams

Every trajectory owns an independent generator whose seed is derived from
(master_seed, trajectory_index) with the SplitMix64 finalizer:

    seed_i = splitmix64(splitmix64(master_seed) XOR trajectory_index)

so results never depend on which worker ran which trajectory.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One SplitMix64 step: advance by the golden gamma and mix"""
    z = (value + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_trajectory_seed(master_seed: int, trajectory_index: int) -> int:
    """Stable 64-bit seed of one trajectory"""
    if trajectory_index < 0:
        raise ValueError("trajectory_index must be non-negative")
    return splitmix64(splitmix64(master_seed & _MASK64) ^ (trajectory_index & _MASK64))


def trajectory_generator(master_seed: int, trajectory_index: int) -> np.random.Generator:
    """PCG64 generator seeded for one trajectory"""
    return np.random.default_rng(derive_trajectory_seed(master_seed, trajectory_index))
