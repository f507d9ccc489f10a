"""
PT-Symmetric Dimer Simulator

Many-particle dynamics of a two-site Bose-Einstein condensate with balanced
particle gain and loss: quantum jump trajectories, an exact block
master-equation solver and the PT-symmetric Gross-Pitaevskii limit.
"""

__version__ = "1.0.0"
__author__ = "hp"

from .analyzers import ExperimentRunner
from .physics import SystemParams, SectorState, MeanFieldState

__all__ = [
    "ExperimentRunner",
    "SystemParams",
    "SectorState",
    "MeanFieldState",
]
