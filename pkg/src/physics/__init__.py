"""
Physics Modules

Fock-sector states, Hamiltonian dynamics, quantum jump trajectories, the
exact block master-equation solver, the PT-symmetric mean-field limit and
the observables shared by all three solvers.
"""

from .fock import SectorState, SystemParams, build_product_state
from .meanfield import MeanFieldState, stationary_states
from .observables import MomentRecord, MomentSeries
from .trajectories import TrajectoryConfig, run_ensemble
from .master_exact import BlockDensityMatrix, evolve_exact

__all__ = [
    "SectorState",
    "SystemParams",
    "build_product_state",
    "MeanFieldState",
    "stationary_states",
    "MomentRecord",
    "MomentSeries",
    "TrajectoryConfig",
    "run_ensemble",
    "BlockDensityMatrix",
    "evolve_exact",
]
