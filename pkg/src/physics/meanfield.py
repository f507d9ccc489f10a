"""
PT-symmetric Gross-Pitaevskii Limit

Two-mode Gross-Pitaevskii equation with balanced gain and loss (gamma = gamma_loss)

    i dc1/dt = -J c2 + g |c1|^2 c1 - i (gamma/2) c1
    i dc2/dt = -J c1 + g |c2|^2 c2 + i (gamma/2) c2

its PT-symmetric stationary states and the region where PT-broken
solutions exist.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, ExistenceError
from .fock import SystemParams
from .integrators import DEFAULT_RK_STEP, check_step, integrate

logger = logging.getLogger(__name__)

STATIONARY_NAMES = ("ground", "excited")


@dataclass(frozen=True)
class MeanFieldState:
    """Complex amplitude pair (c1, c2)"""

    c1: complex
    c2: complex

    def __post_init__(self):
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "MeanFieldState":
        return cls(complex(values[0]), complex(values[1]))

    @classmethod
    def from_named(cls, name: str, params: SystemParams) -> "MeanFieldState":
        """Stationary state by name ('ground' or 'excited')"""
        if name not in STATIONARY_NAMES:
            raise DomainError(f"Unknown stationary state {name!r}, expected one of {STATIONARY_NAMES}")
        return stationary_states(params)[name]

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=np.complex128)

    def norm_squared(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2


def _gpe_derivative(c: np.ndarray, params: SystemParams) -> np.ndarray:
    c1, c2 = c
    half_gamma = 0.5 * params.gamma_loss
    return np.array(
        [
            1j * (params.J * c2 - params.g * abs(c1) ** 2 * c1) - half_gamma * c1,
            1j * (params.J * c1 - params.g * abs(c2) ** 2 * c2) + half_gamma * c2,
        ],
        dtype=np.complex128,
    )


def gpe_rhs(c: MeanFieldState, params: SystemParams) -> MeanFieldState:
    """Time derivative (dc1/dt, dc2/dt)"""
    return MeanFieldState.from_array(_gpe_derivative(c.as_array(), params))


def gpe_evolve(
    c0: MeanFieldState,
    t_final: float,
    step: float = DEFAULT_RK_STEP,
    params: Optional[SystemParams] = None,
    sample_interval: Optional[float] = None,
) -> List[Tuple[float, MeanFieldState]]:
    """
    RK4 integration of the Gross-Pitaevskii equation

    The norm |c1|^2 + |c2|^2 is only conserved for gamma = 0 or for
    stationary states.
    """
    check_step(step)
    params = params or SystemParams()
    return [
        (t, MeanFieldState.from_array(c))
        for t, c in integrate(lambda c: _gpe_derivative(c, params), c0.as_array(), t_final, step, sample_interval)
    ]


def _check_existence(params: SystemParams) -> float:
    ratio = params.gamma_loss / (2.0 * params.J)
    if abs(ratio) > 1.0:
        raise ExistenceError(
            f"PT-symmetric stationary states only exist for |gamma| <= 2J "
            f"(gamma = {params.gamma_loss}, J = {params.J})"
        )
    return math.asin(ratio)


def stationary_states(params: SystemParams) -> Dict[str, MeanFieldState]:
    """
    Ground and excited PT-symmetric stationary states, global phase fixed by c2 real positive

    Raises:
        ExistenceError: if |gamma| > 2J
    """
    phi = _check_existence(params)
    amplitude = 1.0 / math.sqrt(2.0)
    return {
        "ground": MeanFieldState(amplitude * np.exp(1j * phi), amplitude),
        "excited": MeanFieldState(-amplitude * np.exp(-1j * phi), amplitude),
    }


def chemical_potential(name: str, params: SystemParams) -> float:
    """Real mu with gpe_rhs(c) = i mu c for the named stationary state"""
    phi = _check_existence(params)
    if name == "ground":
        return params.J * math.cos(phi) - 0.5 * params.g
    if name == "excited":
        return -params.J * math.cos(phi) - 0.5 * params.g
    raise DomainError(f"Unknown stationary state {name!r}, expected one of {STATIONARY_NAMES}")


def pt_broken_exists(params: SystemParams) -> bool:
    """True iff |gamma| >= sqrt(max(0, 4J^2 - g^2))"""
    threshold = math.sqrt(max(0.0, 4.0 * params.J ** 2 - params.g ** 2))
    return abs(params.gamma_loss) >= threshold
