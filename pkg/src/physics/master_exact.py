"""
Exact Block Master-Equation Solver

Integrates the Lindblad equation

    d rho/dt = -i[H, rho]
               - (gamma_loss/2) (n1 rho + rho n1 - 2 a1 rho a1^dag)
               - (gamma_gain/2) (a2 a2^dag rho + rho a2 a2^dag - 2 a2^dag rho a2)

on a density operator stored as one Hermitian block per particle-number
sector. H conserves N and both sandwich terms shift bra and ket together, so a
block-diagonal initial state stays block-diagonal. Sectors above n_max are
dropped; the probability reaching the top sector is monitored.

This is the small-N reference for the trajectory engine.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigvalsh

from .dynamics import sector_coefficients
from .errors import CapOverflowError, InputValidationError
from .fock import SectorState, SystemParams, site_occupations
from .integrators import DEFAULT_RK_STEP, DEFAULT_SAMPLE_INTERVAL, check_step, rk4_step, sample_times, step_sizes
from .observables import MomentSeries

logger = logging.getLogger(__name__)

DEFAULT_LEAK_TOLERANCE = 1e-6


def default_n_max(N0: int) -> int:
    """Sector cap 2*N0 + 10"""
    return 2 * N0 + 10


def _block_layout(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    dims = np.arange(1, n_max + 2)
    sizes = dims ** 2
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    return dims, offsets


@dataclass(eq=False)
class BlockDensityMatrix:
    """
    Density operator as Hermitian blocks rho_N, N = 0..n_max

    The blocks are views into one flat buffer so the integrator can treat
    the whole operator as a single vector.
    """

    data: np.ndarray
    n_max: int

    def __post_init__(self):
        _, offsets = _block_layout(self.n_max)
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (offsets[-1],):
            raise InputValidationError(
                f"Flat buffer of length {offsets[-1]} expected for n_max={self.n_max}, got {self.data.shape}"
            )

    @classmethod
    def zeros(cls, n_max: int) -> "BlockDensityMatrix":
        _, offsets = _block_layout(n_max)
        return cls(np.zeros(offsets[-1], dtype=np.complex128), n_max)

    @classmethod
    def from_blocks(cls, blocks: Sequence[np.ndarray]) -> "BlockDensityMatrix":
        n_max = len(blocks) - 1
        for N, block in enumerate(blocks):
            if np.shape(block) != (N + 1, N + 1):
                raise InputValidationError(f"Block {N} must be {(N + 1, N + 1)}, got {np.shape(block)}")
        data = np.concatenate([np.asarray(block, dtype=np.complex128).ravel() for block in blocks])
        return cls(data, n_max)

    @classmethod
    def from_pure(cls, state: SectorState, n_max: int) -> "BlockDensityMatrix":
        """|psi><psi| placed in the sector of the state"""
        if state.n_total > n_max:
            raise InputValidationError(f"State sector {state.n_total} exceeds n_max={n_max}")
        rho = cls.zeros(n_max)
        outer = np.outer(state.amplitudes, np.conj(state.amplitudes))
        # outer products are only Hermitian up to rounding
        rho.block(state.n_total)[:] = 0.5 * (outer + outer.conj().T)
        return rho

    def block(self, n_total: int) -> np.ndarray:
        dims, offsets = _block_layout(self.n_max)
        return self.data[offsets[n_total]:offsets[n_total + 1]].reshape(dims[n_total], dims[n_total])

    @property
    def blocks(self) -> List[np.ndarray]:
        return [self.block(N) for N in range(self.n_max + 1)]

    def sector_populations(self) -> np.ndarray:
        return np.array([np.trace(block).real for block in self.blocks])

    def trace(self) -> float:
        return float(self.sector_populations().sum())

    def hermiticity_error(self) -> float:
        return max(float(np.max(np.abs(block - block.conj().T))) for block in self.blocks)

    def min_eigenvalue(self) -> float:
        return min(float(eigvalsh(0.5 * (block + block.conj().T))[0]) for block in self.blocks)

    def state_purity(self) -> float:
        """Many-body purity tr rho^2"""
        return float(sum(np.vdot(block, block).real for block in self.blocks))


@lru_cache(maxsize=256)
def _sector_operators(n_total: int, params: SystemParams):
    """Dense H, decay diagonal and the two feeding amplitudes of sector n_total"""
    diagonal, hopping = sector_coefficients(n_total, params, False)
    hamiltonian = np.diag(diagonal) + np.diag(hopping, 1) + np.diag(hopping, -1)
    n1, n2 = site_occupations(n_total)
    decay = params.gamma_loss * n1 + params.gamma_gain * (n2 + 1.0)
    # a1 from sector N+1 into N keeps the index: sqrt(N+1-m)
    loss_feed = np.sqrt(n_total + 1.0 - np.arange(n_total + 1))
    # a2^dag from sector N-1 into N shifts the index up: sqrt(m+1)
    gain_feed = np.sqrt(np.arange(1, n_total + 1, dtype=np.float64))
    return hamiltonian, decay, loss_feed, gain_feed


class _LindbladGenerator:
    """Right-hand side on the flat block buffer"""

    def __init__(self, params: SystemParams, n_max: int):
        self.params = params
        self.n_max = n_max
        self.dims, self.offsets = _block_layout(n_max)
        self.operators = [_sector_operators(N, params) for N in range(n_max + 1)]

    def _view(self, data: np.ndarray, n_total: int) -> np.ndarray:
        dim = self.dims[n_total]
        return data[self.offsets[n_total]:self.offsets[n_total + 1]].reshape(dim, dim)

    def __call__(self, data: np.ndarray) -> np.ndarray:
        out = np.empty_like(data)
        gamma_loss, gamma_gain = self.params.gamma_loss, self.params.gamma_gain
        for N in range(self.n_max + 1):
            rho = self._view(data, N)
            hamiltonian, decay, loss_feed, gain_feed = self.operators[N]
            drho = -1j * (hamiltonian @ rho - rho @ hamiltonian)
            drho -= 0.5 * (decay[:, None] * rho + rho * decay[None, :])
            if N < self.n_max and gamma_loss:
                above = self._view(data, N + 1)[: N + 1, : N + 1]
                drho += gamma_loss * loss_feed[:, None] * above * loss_feed[None, :]
            if N > 0 and gamma_gain:
                below = self._view(data, N - 1)
                drho[1:, 1:] += gamma_gain * gain_feed[:, None] * below * gain_feed[None, :]
            self._view(out, N)[:] = drho
        return out


def lindblad_rhs(rho: BlockDensityMatrix, params: SystemParams) -> BlockDensityMatrix:
    """d rho/dt, block by block"""
    return BlockDensityMatrix(_LindbladGenerator(params, rho.n_max)(rho.data), rho.n_max)


def block_moments(rho: BlockDensityMatrix) -> Tuple[float, float, complex]:
    """(m11, m22, m12) = sum_N tr(rho_N a_j^dag a_k)"""
    m11 = m22 = 0.0
    m12 = 0j
    for N, block in enumerate(rho.blocks):
        n1, n2 = site_occupations(N)
        populations = np.diagonal(block).real
        m11 += float(np.sum(n1 * populations))
        m22 += float(np.sum(n2 * populations))
        coupling = np.sqrt(n1[:-1] * (n2[:-1] + 1.0))
        m12 += complex(np.sum(coupling * np.diagonal(block, -1)))
    return m11, m22, m12


def integrate_blocks(
    rho0: BlockDensityMatrix,
    t_final: float,
    rk_step: float,
    params: SystemParams,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    leak_tolerance: Optional[float] = DEFAULT_LEAK_TOLERANCE,
) -> Iterator[Tuple[float, BlockDensityMatrix]]:
    """
    RK4 integration of the block master equation, yielding on the sample grid

    Raises:
        CapOverflowError: when the top sector holds more than leak_tolerance
    """
    check_step(rk_step)
    generator = _LindbladGenerator(params, rho0.n_max)
    top = rho0.n_max
    _, offsets = _block_layout(top)
    top_diagonal = np.arange(top + 1) * (top + 2)

    def top_population(data: np.ndarray) -> float:
        return float(data[offsets[top]:][top_diagonal].real.sum())

    times = sample_times(t_final, sample_interval)
    data = rho0.data.copy()
    yield float(times[0]), BlockDensityMatrix(data.copy(), top)
    for t_start, t_stop in zip(times[:-1], times[1:]):
        for h in step_sizes(t_stop - t_start, rk_step):
            data = rk4_step(generator, data, h)
            if leak_tolerance is not None and top_population(data) > leak_tolerance:
                raise CapOverflowError(
                    f"Sector cap n_max={top} holds probability {top_population(data):.3e} "
                    f"> {leak_tolerance:.1e} near t={t_stop:.3f}; increase n_max"
                )
        yield float(t_stop), BlockDensityMatrix(data.copy(), top)


def evolve_exact(
    rho0: BlockDensityMatrix,
    t_final: float,
    rk_step: float = DEFAULT_RK_STEP,
    params: Optional[SystemParams] = None,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    leak_tolerance: Optional[float] = DEFAULT_LEAK_TOLERANCE,
) -> MomentSeries:
    """
    Moments <a_j^dag a_k>(t) of the exact solution on the sample grid

    Returns:
        MomentSeries, i.e. a sequence of time-stamped MomentRecord
    """
    params = params or SystemParams()
    logger.info(f"Exact block integration: n_max={rho0.n_max}, t_final={t_final}, rk_step={rk_step}")
    times, m11, m22, m12 = [], [], [], []
    rho = rho0
    for t, rho in integrate_blocks(rho0, t_final, rk_step, params, sample_interval, leak_tolerance):
        moments = block_moments(rho)
        times.append(t)
        m11.append(moments[0])
        m22.append(moments[1])
        m12.append(moments[2])
    logger.info(f"Exact block integration finished, trace drift {abs(rho.trace() - 1.0):.2e}")
    return MomentSeries(t=times, m11=m11, m22=m22, m12=m12)
