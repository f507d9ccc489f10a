"""
Observables

Moments <a_j^dag a_k>, the reduced single-particle density matrix

    sigma_red,jk = <a_j^dag a_k> / sum_i <a_i^dag a_i>

and the scalar observables derived from it: purity P = 2 tr sigma^2 - 1,
contrast nu = 2|<a1^dag a2>| / <n> and imbalance I = ((n1 - n2)/n)^2, which
satisfy nu^2 = P - I exactly.

Purity and contrast of an ensemble are always computed from ensemble-averaged
moments, never averaged per trajectory.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import DomainError, InputValidationError
from .fock import SectorState, norm_squared, site_occupations
from .meanfield import MeanFieldState

logger = logging.getLogger(__name__)

OBSERVABLE_COLUMNS = ["t", "n1", "n2", "n_total", "re_m12", "im_m12", "purity", "contrast", "imbalance"]


@dataclass(frozen=True)
class MomentRecord:
    """Time-stamped first moments of the two modes"""

    t: float
    m11: float
    m22: float
    m12: complex

    @property
    def n_total(self) -> float:
        return self.m11 + self.m22


@dataclass(eq=False)
class MomentSeries:
    """
    Columnar sequence of MomentRecord on one time grid

    Trajectory results also carry their jump bookkeeping.
    """

    t: np.ndarray
    m11: np.ndarray
    m22: np.ndarray
    m12: np.ndarray
    n_gains: int = 0
    n_losses: int = 0
    final_sector: Optional[int] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.m11 = np.asarray(self.m11, dtype=np.float64)
        self.m22 = np.asarray(self.m22, dtype=np.float64)
        self.m12 = np.asarray(self.m12, dtype=np.complex128)
        shapes = {self.t.shape, self.m11.shape, self.m22.shape, self.m12.shape}
        if len(shapes) != 1 or self.t.ndim != 1:
            raise InputValidationError(f"Moment columns must be 1-d and of equal length, got {shapes}")

    @classmethod
    def from_records(cls, records: Iterable[MomentRecord]) -> "MomentSeries":
        records = list(records)
        return cls(
            t=[r.t for r in records],
            m11=[r.m11 for r in records],
            m22=[r.m22 for r in records],
            m12=[r.m12 for r in records],
        )

    @property
    def n_total(self) -> np.ndarray:
        return self.m11 + self.m22

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, index: int) -> MomentRecord:
        return MomentRecord(
            t=float(self.t[index]),
            m11=float(self.m11[index]),
            m22=float(self.m22[index]),
            m12=complex(self.m12[index]),
        )

    def __iter__(self) -> Iterator[MomentRecord]:
        return (self[i] for i in range(len(self)))

    def scaled(self, factor: float) -> "MomentSeries":
        return MomentSeries(self.t, self.m11 * factor, self.m22 * factor, self.m12 * factor)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    """2x2 Hermitian single-particle density matrix with unit trace"""

    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Occupations of the condensed and non-condensed mode, ascending"""
        return np.linalg.eigvalsh(self.matrix)


def moments_of_state(state: SectorState, t: float = 0.0) -> MomentRecord:
    """
    Moments of the normalized state psi/||psi||

    Returns:
        MomentRecord with m11 + m22 = N
    """
    norm2 = norm_squared(state)
    if norm2 == 0.0:
        raise DomainError("Moments of the zero state are undefined")
    N = state.n_total
    psi = state.amplitudes
    probabilities = np.abs(psi) ** 2 / norm2
    n1, n2 = site_occupations(N)
    coupling = np.sqrt(n1[:-1] * (n2[:-1] + 1.0))
    m12 = np.sum(coupling * np.conj(psi[:-1]) * psi[1:]) / norm2
    return MomentRecord(
        t=float(t),
        m11=float(np.sum(n1 * probabilities)),
        m22=float(np.sum(n2 * probabilities)),
        m12=complex(m12),
    )


def _total(m11, m22):
    total = np.asarray(m11) + np.asarray(m22)
    if np.any(total <= 0):
        raise DomainError("Observables need a positive total particle number")
    return total


def reduced_density(m: MomentRecord) -> ReducedDensityMatrix:
    total = float(_total(m.m11, m.m22))
    matrix = np.array([[m.m11, m.m12], [np.conj(m.m12), m.m22]], dtype=np.complex128) / total
    return ReducedDensityMatrix(matrix)


def purity(sigma: ReducedDensityMatrix) -> float:
    """P = 2 tr sigma^2 - 1"""
    s = sigma.matrix
    return float(2.0 * (s[0, 0].real ** 2 + s[1, 1].real ** 2 + 2.0 * abs(s[0, 1]) ** 2) - 1.0)


def contrast(m: MomentRecord) -> float:
    """nu = 2|m12| / (m11 + m22)"""
    return float(2.0 * abs(m.m12) / _total(m.m11, m.m22))


def imbalance(m: MomentRecord) -> float:
    """I = ((m11 - m22) / (m11 + m22))^2"""
    return float(((m.m11 - m.m22) / _total(m.m11, m.m22)) ** 2)


def meanfield_moments(c: MeanFieldState, t: float = 0.0) -> MomentRecord:
    """Rank-1 moments m_jk = conj(c_j) c_k of a mean-field state"""
    if c.norm_squared() == 0.0:
        raise DomainError("Mean-field moments of the zero vector are undefined")
    return MomentRecord(
        t=float(t),
        m11=abs(c.c1) ** 2,
        m22=abs(c.c2) ** 2,
        m12=complex(np.conj(c.c1) * c.c2),
    )


def observable_arrays(m11, m22, m12) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (purity, contrast, imbalance) with the same formulas as the scalar functions"""
    m11 = np.asarray(m11, dtype=np.float64)
    m22 = np.asarray(m22, dtype=np.float64)
    m12 = np.asarray(m12, dtype=np.complex128)
    total = _total(m11, m22)
    s11, s22, s12 = m11 / total, m22 / total, np.abs(m12) / total
    purity_values = 2.0 * (s11 ** 2 + s22 ** 2 + 2.0 * s12 ** 2) - 1.0
    contrast_values = 2.0 * np.abs(m12) / total
    imbalance_values = ((m11 - m22) / total) ** 2
    return purity_values, contrast_values, imbalance_values


def moment_series_observables(series: MomentSeries) -> pd.DataFrame:
    """Analysis-ready frame with one row per sample time"""
    purity_values, contrast_values, imbalance_values = observable_arrays(series.m11, series.m22, series.m12)
    return pd.DataFrame(
        {
            "t": series.t,
            "n1": series.m11,
            "n2": series.m22,
            "n_total": series.n_total,
            "re_m12": series.m12.real,
            "im_m12": series.m12.imag,
            "purity": purity_values,
            "contrast": contrast_values,
            "imbalance": imbalance_values,
        },
        columns=OBSERVABLE_COLUMNS,
    )
