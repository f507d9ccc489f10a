"""
Fock Sector Core

Pure many-body states of the two-site Bose-Hubbard dimer live in a single
sector of fixed total particle number N. The amplitude at index m belongs to
the Fock ket |N-m, m>, i.e. n1 = N-m particles on site 1 and n2 = m on site 2.
This basis ordering (m = n2 ascending) is used by every module of the package.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InputValidationError

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-10
PAIR_NORMALIZATION_TOLERANCE = 1e-8

SITES = (1, 2)


@dataclass(frozen=True)
class SystemParams:
    """
    Physical parameters of the dimer (units with hbar = 1)

    gamma_gain is balanced against gamma_loss unless gamma_gain_override is
    given, which isolates a single channel (e.g. pure gain).
    """

    J: float = 1.0
    g: float = 0.5
    N0: int = 100
    gamma_loss: float = 0.0
    gamma_gain_override: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.N0, bool) or int(self.N0) != self.N0:
            raise DomainError(f"N0 must be an integer, got {self.N0!r}")
        object.__setattr__(self, "N0", int(self.N0))
        if self.N0 < 1:
            raise DomainError(f"N0 must be at least 1, got {self.N0}")
        if self.N0 == 1 and self.g != 0:
            raise InputValidationError("N0 = 1 requires g = 0 (U = g/(N0-1) is undefined)")
        if self.gamma_loss < 0:
            raise InputValidationError(f"gamma_loss must be non-negative, got {self.gamma_loss}")
        if self.gamma_gain_override is not None and self.gamma_gain_override < 0:
            raise InputValidationError(f"gamma_gain_override must be non-negative, got {self.gamma_gain_override}")

    @property
    def U(self) -> float:
        """On-site interaction U = g/(N0-1)"""
        if self.N0 == 1:
            return 0.0
        return self.g / (self.N0 - 1)

    @property
    def gamma_gain(self) -> float:
        """Gain rate fixed by gamma_gain/gamma_loss = N0/(N0+2)"""
        if self.gamma_gain_override is not None:
            return self.gamma_gain_override
        return self.gamma_loss * self.N0 / (self.N0 + 2)


@dataclass(frozen=True, eq=False)
class SectorState:
    """Pure state confined to the sector with n_total particles"""

    n_total: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_total < 0:
            raise DomainError(f"Sector particle number must be non-negative, got {self.n_total}")
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (self.n_total + 1,):
            raise InputValidationError(
                f"Sector {self.n_total} needs {self.n_total + 1} amplitudes, got shape {amplitudes.shape}"
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def zero(cls, n_total: int) -> "SectorState":
        """Zero vector of a sector"""
        return cls(n_total, np.zeros(n_total + 1, dtype=np.complex128))

    @classmethod
    def basis(cls, n1: int, n2: int) -> "SectorState":
        """Fock ket |n1, n2>"""
        amplitudes = np.zeros(n1 + n2 + 1, dtype=np.complex128)
        amplitudes[n2] = 1.0
        return cls(n1 + n2, amplitudes)

    @property
    def dimension(self) -> int:
        return self.n_total + 1

    def is_normalized(self, tol: float = NORMALIZATION_TOLERANCE) -> bool:
        return abs(norm_squared(self) - 1.0) < tol

    def normalized(self) -> "SectorState":
        norm2 = norm_squared(self)
        if norm2 == 0.0:
            raise DomainError("Cannot normalize the zero state")
        return SectorState(self.n_total, self.amplitudes / math.sqrt(norm2))

    def __add__(self, other: "SectorState") -> "SectorState":
        if other.n_total != self.n_total:
            raise InputValidationError(f"Cannot add states of sectors {self.n_total} and {other.n_total}")
        return SectorState(self.n_total, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "SectorState") -> "SectorState":
        if other.n_total != self.n_total:
            raise InputValidationError(f"Cannot subtract states of sectors {self.n_total} and {other.n_total}")
        return SectorState(self.n_total, self.amplitudes - other.amplitudes)

    def __mul__(self, factor: complex) -> "SectorState":
        return SectorState(self.n_total, self.amplitudes * factor)

    __rmul__ = __mul__


def site_occupations(n_total: int):
    """Occupations (n1, n2) of every basis index of a sector"""
    m = np.arange(n_total + 1, dtype=np.float64)
    return n_total - m, m


def log_binomial(n: int, k) -> np.ndarray:
    """log C(n, k) via log-gamma, stable for large n"""
    k = np.asarray(k, dtype=np.float64)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _log_power(modulus: float, exponent: np.ndarray) -> np.ndarray:
    # exponent 0 contributes log(1) = 0 even when the modulus vanishes
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(exponent == 0, 0.0, exponent * np.log(modulus))


def build_product_state(c1: complex, c2: complex, N0: int) -> SectorState:
    """
    Many-particle product state of N0 particles in the single-particle mode (c1, c2)

    Args:
        c1: Amplitude on site 1
        c2: Amplitude on site 2
        N0: Particle number

    Returns:
        Normalized SectorState with amplitude sqrt(C(N0, m)) c1^(N0-m) c2^m at index m
    """
    if isinstance(N0, bool) or int(N0) != N0 or N0 < 1:
        raise DomainError(f"N0 must be an integer of at least 1, got {N0!r}")
    N0 = int(N0)
    pair_norm = abs(c1) ** 2 + abs(c2) ** 2
    if abs(pair_norm - 1.0) > PAIR_NORMALIZATION_TOLERANCE:
        raise InputValidationError(f"Mean-field pair is not normalized: |c1|^2 + |c2|^2 = {pair_norm}")

    n1, m = site_occupations(N0)
    log_modulus = 0.5 * log_binomial(N0, m) + _log_power(abs(c1), n1) + _log_power(abs(c2), m)
    phase = n1 * np.angle(c1) + m * np.angle(c2)
    amplitudes = np.exp(log_modulus) * np.exp(1j * phase)
    return SectorState(N0, amplitudes)


def _check_site(site: int) -> None:
    if site not in SITES:
        raise InputValidationError(f"Site must be 1 or 2, got {site!r}")


def apply_annihilation(site: int, state: SectorState) -> SectorState:
    """a_site |psi>, an unnormalized state in sector N-1 (zero state of sector 0 when N = 0)"""
    _check_site(site)
    N = state.n_total
    if N == 0:
        return SectorState.zero(0)
    psi = state.amplitudes
    if site == 1:
        # |N-m, m> -> sqrt(N-m) |N-1-m, m>, index unchanged
        out = np.sqrt(N - np.arange(N, dtype=np.float64)) * psi[:-1]
    else:
        # |N-m, m> -> sqrt(m) |N-m, m-1>, index shifts down
        out = np.sqrt(np.arange(1, N + 1, dtype=np.float64)) * psi[1:]
    return SectorState(N - 1, out)


def apply_creation(site: int, state: SectorState) -> SectorState:
    """a_site^dagger |psi>, an unnormalized state in sector N+1"""
    _check_site(site)
    N = state.n_total
    psi = state.amplitudes
    out = np.zeros(N + 2, dtype=np.complex128)
    if site == 1:
        out[:-1] = np.sqrt(N + 1 - np.arange(N + 1, dtype=np.float64)) * psi
    else:
        out[1:] = np.sqrt(np.arange(1, N + 2, dtype=np.float64)) * psi
    return SectorState(N + 1, out)


def norm_squared(state: Union[SectorState, np.ndarray]) -> float:
    """Sum of squared amplitude magnitudes"""
    amplitudes = state.amplitudes if isinstance(state, SectorState) else state
    return float(np.vdot(amplitudes, amplitudes).real)


def number_expectation(site: int, state: SectorState) -> float:
    """<psi| a_site^dagger a_site |psi> summed directly over the basis"""
    _check_site(site)
    n1, n2 = site_occupations(state.n_total)
    occupation = n1 if site == 1 else n2
    return float(np.sum(occupation * np.abs(state.amplitudes) ** 2))
