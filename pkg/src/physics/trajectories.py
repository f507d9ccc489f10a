"""
Quantum Jump Trajectories

Monte Carlo wave function unraveling of the master equation with loss
on site 1 (jump operator a1) and gain on site 2 (jump operator a2^dag).

Waiting-time algorithm per trajectory:
  1. draw r ~ U(0, 1)
  2. evolve with H_eff (norm decays) until ||psi||^2 <= r
  3. locate the jump time inside the last step, renormalize
  4. pick the channel with probabilities proportional to
     gamma_loss <n1> and gamma_gain (<n2> + 1), apply the jump
  5. redraw r and continue to t_final

Moments are recorded on the normalized state at every sample time; the
ensemble mean of these moments reproduces the density-operator moments.
"""

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from utils.rng import trajectory_generator

from .dynamics import EffectiveHamiltonian
from .errors import GridMismatchError, InputValidationError, JumpLogicError
from .fock import SectorState, SystemParams, apply_annihilation, apply_creation, norm_squared, site_occupations
from .integrators import DEFAULT_RK_STEP, DEFAULT_SAMPLE_INTERVAL, sample_times
from .observables import MomentSeries, moments_of_state

logger = logging.getLogger(__name__)

JUMP_TIME_TOLERANCE = 1e-6
MAX_JUMP_SEARCH_ITERATIONS = 60

_TIME_EPS = 1e-12


class JumpChannel(Enum):
    LOSS_SITE1 = "loss_site1"
    GAIN_SITE2 = "gain_site2"


@dataclass(frozen=True, eq=False)
class TrajectoryConfig:
    """Everything a single trajectory (and the ensemble) needs"""

    params: SystemParams
    initial: SectorState
    t_final: float
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL
    rk_step: float = DEFAULT_RK_STEP
    master_seed: int = 1
    n_trajectories: int = 500

    def __post_init__(self):
        if not self.t_final > 0:
            raise InputValidationError(f"t_final must be positive, got {self.t_final}")
        if not self.rk_step > 0:
            raise InputValidationError(f"rk_step must be positive, got {self.rk_step}")
        if self.sample_interval < self.rk_step:
            raise InputValidationError(
                f"sample_interval ({self.sample_interval}) must not be smaller than rk_step ({self.rk_step})"
            )
        if self.n_trajectories < 1:
            raise InputValidationError(f"n_trajectories must be positive, got {self.n_trajectories}")
        if not self.initial.is_normalized():
            raise InputValidationError("Initial trajectory state must be normalized")


@dataclass(eq=False)
class EnsembleAverage:
    """Ensemble-averaged moments with the standard error of <n>"""

    series: MomentSeries
    stderr_n_total: np.ndarray
    n_trajectories: int
    total_jumps: int = 0


def _jump_weights(state: SectorState, params: SystemParams) -> Tuple[float, float]:
    n1, n2 = site_occupations(state.n_total)
    probabilities = np.abs(state.amplitudes) ** 2
    probabilities = probabilities / probabilities.sum()
    loss_weight = params.gamma_loss * float(np.sum(n1 * probabilities))
    gain_weight = params.gamma_gain * (float(np.sum(n2 * probabilities)) + 1.0)
    return loss_weight, gain_weight


def select_jump_channel(state: SectorState, params: SystemParams, u: float) -> JumpChannel:
    """
    Pick the jump channel for a uniform draw u in [0, 1)

    LOSS_SITE1 is chosen with probability w_l / (w_l + w_g), where
    w_l = gamma_loss <n1> and w_g = gamma_gain (<n2> + 1).
    """
    loss_weight, gain_weight = _jump_weights(state, params)
    total = loss_weight + gain_weight
    if total <= 0.0:
        raise JumpLogicError("No jump channel is open (gamma_loss = gamma_gain = 0)")
    return JumpChannel.LOSS_SITE1 if u < loss_weight / total else JumpChannel.GAIN_SITE2


def apply_jump(state: SectorState, channel: JumpChannel) -> SectorState:
    """Normalized post-jump state a1 psi/||a1 psi|| or a2^dag psi/||a2^dag psi||"""
    if channel is JumpChannel.LOSS_SITE1:
        jumped = apply_annihilation(1, state)
    else:
        jumped = apply_creation(2, state)
    if norm_squared(jumped) == 0.0:
        raise JumpLogicError(f"Jump {channel.value} annihilates the state")
    return jumped.normalized()


def _locate_jump(
    hamiltonian: EffectiveHamiltonian, psi: np.ndarray, h: float, norm_end: float, threshold: float
) -> Tuple[float, np.ndarray]:
    """
    Time tau in (0, h] at which ||psi(tau)||^2 crosses the threshold

    Bracketed search; trial points come from log-linear interpolation of the
    norm, with a midpoint whenever the same bracket end moved twice in a row.
    """
    lower, upper = 0.0, h
    norm_lower = norm_squared(psi)
    norm_upper = norm_end
    last_side = None
    repeated = False
    tau, trial = upper, None
    for _ in range(MAX_JUMP_SEARCH_ITERATIONS):
        tau = 0.5 * (lower + upper)
        if not repeated and norm_upper > 0.0 and norm_lower > norm_upper:
            guess = lower + (upper - lower) * math.log(norm_lower / threshold) / math.log(norm_lower / norm_upper)
            if lower < guess < upper:
                tau = guess
        trial = hamiltonian.rk4_step(psi, tau)
        norm_trial = norm_squared(trial)
        if abs(norm_trial - threshold) < JUMP_TIME_TOLERANCE * threshold:
            return tau, trial
        side = "lower" if norm_trial > threshold else "upper"
        repeated = side == last_side
        last_side = side
        if side == "lower":
            lower, norm_lower = tau, norm_trial
        else:
            upper, norm_upper = tau, norm_trial
    logger.debug(f"Jump-time search stopped after {MAX_JUMP_SEARCH_ITERATIONS} iterations at tau={tau:.3e}")
    return tau, trial


def run_trajectory(config: TrajectoryConfig, trajectory_index: int) -> MomentSeries:
    """
    One quantum jump trajectory, deterministic in (master_seed, trajectory_index)

    Returns:
        MomentSeries of the normalized state on the sample grid, with jump counts
    """
    params = config.params
    rng = trajectory_generator(config.master_seed, trajectory_index)
    hamiltonian = EffectiveHamiltonian(params)
    times = sample_times(config.t_final, config.sample_interval)
    jumps_enabled = params.gamma_loss > 0.0 or params.gamma_gain > 0.0

    m11 = np.empty(len(times))
    m22 = np.empty(len(times))
    m12 = np.empty(len(times), dtype=np.complex128)

    def record(index: int, state: SectorState) -> None:
        moments = moments_of_state(state, times[index])
        m11[index], m22[index], m12[index] = moments.m11, moments.m22, moments.m12

    n_total = config.initial.n_total
    psi = config.initial.amplitudes
    threshold = rng.random() if jumps_enabled else 0.0
    n_gains = n_losses = 0
    t = 0.0
    record(0, config.initial)

    for k in range(1, len(times)):
        t_stop = times[k]
        while t_stop - t > _TIME_EPS:
            h = min(config.rk_step, t_stop - t)
            trial = hamiltonian.rk4_step(psi, h)
            norm_trial = norm_squared(trial)
            if not (jumps_enabled and norm_trial <= threshold):
                psi = trial
                t += h
                continue
            tau, psi = _locate_jump(hamiltonian, psi, h, norm_trial, threshold)
            t += tau
            state = SectorState(n_total, psi).normalized()
            channel = select_jump_channel(state, params, rng.random())
            state = apply_jump(state, channel)
            if channel is JumpChannel.LOSS_SITE1:
                n_losses += 1
            else:
                n_gains += 1
            n_total, psi = state.n_total, state.amplitudes
            threshold = rng.random()
        t = t_stop
        record(k, SectorState(n_total, psi))

    logger.debug(
        f"Trajectory {trajectory_index}: {n_gains} gains, {n_losses} losses, final sector {n_total}"
    )
    return MomentSeries(
        t=times, m11=m11, m22=m22, m12=m12, n_gains=n_gains, n_losses=n_losses, final_sector=n_total
    )


def average_ensemble(trajectories: Sequence[MomentSeries]) -> EnsembleAverage:
    """
    Equal-weight mean of the moments of all trajectories, reduced in the given order

    Raises:
        GridMismatchError: if the trajectories do not share one time grid
    """
    if len(trajectories) == 0:
        raise InputValidationError("Cannot average an empty ensemble")
    grid = trajectories[0].t
    for index, series in enumerate(trajectories):
        if series.t.shape != grid.shape or not np.array_equal(series.t, grid):
            raise GridMismatchError(f"Trajectory {index} does not share the ensemble time grid")

    m11 = np.stack([s.m11 for s in trajectories])
    m22 = np.stack([s.m22 for s in trajectories])
    m12 = np.stack([s.m12 for s in trajectories])
    count = len(trajectories)
    if count > 1:
        stderr = np.std(m11 + m22, axis=0, ddof=1) / math.sqrt(count)
    else:
        stderr = np.zeros(len(grid))
    return EnsembleAverage(
        series=MomentSeries(t=grid.copy(), m11=m11.mean(axis=0), m22=m22.mean(axis=0), m12=m12.mean(axis=0)),
        stderr_n_total=stderr,
        n_trajectories=count,
        total_jumps=sum(s.n_gains + s.n_losses for s in trajectories),
    )


def run_ensemble(config: TrajectoryConfig, workers: Optional[int] = None) -> EnsembleAverage:
    """
    Run all trajectories (in parallel when workers != 1) and average them

    Args:
        config: Trajectory configuration
        workers: joblib n_jobs; None uses every core. Never changes the result.
    """
    n_jobs = -1 if workers is None else workers
    logger.info(
        f"Running {config.n_trajectories} trajectories (N0={config.initial.n_total}, "
        f"gamma_loss={config.params.gamma_loss}, t_final={config.t_final}, n_jobs={n_jobs})"
    )
    start_time = time.perf_counter()
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_trajectory)(config, index) for index in range(config.n_trajectories)
    )
    ensemble = average_ensemble(results)
    logger.info(
        f"Ensemble of {ensemble.n_trajectories} trajectories finished in "
        f"{time.perf_counter() - start_time:.2f} seconds ({ensemble.total_jumps} jumps)"
    )
    return ensemble
