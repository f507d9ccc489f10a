"""
Sector Dynamics

Matrix-free action of the Bose-Hubbard Hamiltonian

    H = -J (a1^dag a2 + a2^dag a1) + (U/2) (a1^dag a1^dag a1 a1 + a2^dag a2^dag a2 a2)

and of the non-Hermitian effective Hamiltonian of the quantum jump method

    H_eff = H - (i/2) [gamma_loss n1 + gamma_gain (n2 + 1)]

on a single particle-number sector. The +1 comes from normal ordering the
gain generator a2 a2^dag. Both operators are tridiagonal in the Fock basis and
are never materialized.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .errors import DomainError, InputValidationError
from .fock import SectorState, SystemParams, norm_squared, site_occupations
from .integrators import DEFAULT_RK_STEP, check_step, integrate

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1024)
def sector_coefficients(n_total: int, params: SystemParams, includes_decay: bool) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tridiagonal coefficients of H (or H_eff) in sector n_total

    Returns:
        (diagonal, hopping) where hopping[m] = -J sqrt((N-m)(m+1)) couples m and m+1
    """
    n1, n2 = site_occupations(n_total)
    diagonal = 0.5 * params.U * (n1 * (n1 - 1.0) + n2 * (n2 - 1.0)) + 0j
    if includes_decay:
        diagonal = diagonal - 0.5j * (params.gamma_loss * n1 + params.gamma_gain * (n2 + 1.0))
    hopping = -params.J * np.sqrt(n1[:-1] * (n2[:-1] + 1.0))
    diagonal.setflags(write=False)
    hopping.setflags(write=False)
    return diagonal, hopping


def _tridiagonal_apply(psi: np.ndarray, diagonal: np.ndarray, hopping: np.ndarray) -> np.ndarray:
    out = diagonal * psi
    out[:-1] += hopping * psi[1:]
    out[1:] += hopping * psi[:-1]
    return out


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """H_eff of the dimer; with includes_decay off it is the Hermitian H"""

    params: SystemParams
    includes_decay: bool = True

    def coefficients(self, n_total: int) -> Tuple[np.ndarray, np.ndarray]:
        return sector_coefficients(n_total, self.params, self.includes_decay)

    def apply_amplitudes(self, psi: np.ndarray) -> np.ndarray:
        diagonal, hopping = self.coefficients(len(psi) - 1)
        return _tridiagonal_apply(psi, diagonal, hopping)

    def apply(self, state: SectorState) -> SectorState:
        return SectorState(state.n_total, self.apply_amplitudes(state.amplitudes))

    def derivative(self, psi: np.ndarray) -> np.ndarray:
        """Right-hand side -i H_eff psi of the Schroedinger equation"""
        return -1j * self.apply_amplitudes(psi)

    def rk4_step(self, psi: np.ndarray, h: float) -> np.ndarray:
        """One RK4 step; the sector coefficients are looked up once"""
        diagonal, hopping = self.coefficients(len(psi) - 1)
        diagonal = -1j * diagonal
        hopping = -1j * hopping
        k1 = _tridiagonal_apply(psi, diagonal, hopping)
        k2 = _tridiagonal_apply(psi + (0.5 * h) * k1, diagonal, hopping)
        k3 = _tridiagonal_apply(psi + (0.5 * h) * k2, diagonal, hopping)
        k4 = _tridiagonal_apply(psi + h * k3, diagonal, hopping)
        return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def apply_hamiltonian(state: SectorState, params: SystemParams) -> SectorState:
    """H |psi> within the same sector"""
    return EffectiveHamiltonian(params, includes_decay=False).apply(state)


def apply_effective_hamiltonian(state: SectorState, params: SystemParams) -> SectorState:
    """H_eff |psi> = H |psi> - (i/2)[gamma_loss n1 + gamma_gain (n2+1)] |psi>"""
    return EffectiveHamiltonian(params, includes_decay=True).apply(state)


def decay_rate(state: SectorState, params: SystemParams) -> float:
    """<psi| gamma_loss n1 + gamma_gain (n2+1) |psi>, equal to -d||psi||^2/dt"""
    n1, n2 = site_occupations(state.n_total)
    weights = params.gamma_loss * n1 + params.gamma_gain * (n2 + 1.0)
    return float(np.sum(weights * np.abs(state.amplitudes) ** 2))


def evolve_between_jumps(
    state: SectorState,
    t_span: Tuple[float, float],
    params: SystemParams,
    step: float = DEFAULT_RK_STEP,
) -> List[Tuple[float, SectorState]]:
    """
    Deterministic no-jump evolution d psi/dt = -i H_eff psi

    Args:
        state: Initial state with norm at most 1
        t_span: (t_start, t_stop)
        params: System parameters
        step: RK4 step, the final partial step is shortened

    Returns:
        (time, state) after every step, starting with the input state. States
        are not renormalized; their decaying norm is the jump clock.
    """
    check_step(step)
    t_start, t_stop = t_span
    if t_stop < t_start:
        raise DomainError(f"t_span must be ordered, got {t_span}")
    if norm_squared(state) > 1.0 + 1e-10:
        raise InputValidationError("State norm exceeds 1")

    hamiltonian = EffectiveHamiltonian(params)
    return [
        (t_start + t, SectorState(state.n_total, psi))
        for t, psi in integrate(hamiltonian.derivative, state.amplitudes, t_stop - t_start, step)
    ]
