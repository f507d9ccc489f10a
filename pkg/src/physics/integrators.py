"""
Fixed-step Runge-Kutta integration

Classical 4th order Runge-Kutta shared by all three solvers:

  y(t+h) = y(t) + h*[(1/6)k1 + (1/3)k2 + (1/3)k3 + (1/6)k4]

  k1 = f[y(t)]
  k2 = f[y(t) + (1/2)h*k1]
  k3 = f[y(t) + (1/2)h*k2]
  k4 = f[y(t) + h*k3]

All right-hand sides in this package are autonomous. Steps are laid out from
one sample time to the next, so the last step before a sample is shortened
and every sample lands exactly on the grid.
"""

import math
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from .errors import DomainError

DEFAULT_RK_STEP = 1e-3
DEFAULT_SAMPLE_INTERVAL = 0.01

_GRID_EPS = 1e-9

Rhs = Callable[[np.ndarray], np.ndarray]


def check_step(step: float) -> None:
    if not step > 0:
        raise DomainError(f"Integration step must be positive, got {step}")


def rk4_step(rhs: Rhs, y: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step of length h"""
    k1 = rhs(y)
    k2 = rhs(y + (0.5 * h) * k1)
    k3 = rhs(y + (0.5 * h) * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def sample_times(t_final: float, sample_interval: float) -> np.ndarray:
    """
    Shared sample grid t_k = k * sample_interval

    t_final is appended when it does not fall on the grid.
    """
    if t_final < 0:
        raise DomainError(f"t_final must be non-negative, got {t_final}")
    check_step(sample_interval)
    count = int(math.floor(t_final / sample_interval + _GRID_EPS))
    times = np.arange(count + 1, dtype=np.float64) * sample_interval
    if t_final - times[-1] > _GRID_EPS * max(1.0, t_final):
        times = np.append(times, t_final)
    return times


def step_sizes(span: float, step: float) -> List[float]:
    """Full steps covering span, the last one shortened"""
    check_step(step)
    if span <= 0:
        return []
    count = max(1, int(math.ceil(span / step - _GRID_EPS)))
    return [step] * (count - 1) + [span - (count - 1) * step]


def integrate(
    rhs: Rhs,
    y0: np.ndarray,
    t_final: float,
    step: float,
    sample_interval: Optional[float] = None,
) -> Iterator[Tuple[float, np.ndarray]]:
    """
    Integrate dy/dt = rhs(y) and yield (t, y) on the sample grid

    Args:
        rhs: Autonomous right-hand side
        y0: Initial value (not modified)
        t_final: End time
        step: RK4 step
        sample_interval: Spacing of yielded samples (default: every step)

    Yields:
        (time, value) pairs, starting with (0, y0)
    """
    check_step(step)
    times = sample_times(t_final, sample_interval or step)
    y = np.array(y0, copy=True)
    yield float(times[0]), y
    for t_start, t_stop in zip(times[:-1], times[1:]):
        for h in step_sizes(t_stop - t_start, step):
            y = rk4_step(rhs, y, h)
        yield float(t_stop), y
