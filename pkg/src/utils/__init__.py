"""
Utility Modules

This package contains logging setup, result writing and deterministic
random-number streams.
"""

from .data_writer import DataWriter
from .logger import setup_logger
from .rng import derive_trajectory_seed, trajectory_generator

__all__ = [
    "DataWriter",
    "setup_logger",
    "derive_trajectory_seed",
    "trajectory_generator",
]
