import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from physics.dynamics import EffectiveHamiltonian
from physics.errors import GridMismatchError, InputValidationError, JumpLogicError
from physics.fock import SectorState, SystemParams, build_product_state, norm_squared
from physics.observables import MomentSeries, observable_arrays
from physics.trajectories import (
    JUMP_TIME_TOLERANCE,
    JumpChannel,
    TrajectoryConfig,
    _locate_jump,
    apply_jump,
    average_ensemble,
    run_ensemble,
    run_trajectory,
    select_jump_channel,
)

SQRT2 = math.sqrt(2.0)


def small_config(params, state, **kwargs):
    kwargs.setdefault("t_final", 1.0)
    kwargs.setdefault("n_trajectories", 8)
    return TrajectoryConfig(params=params, initial=state, **kwargs)


class TestSelectJumpChannel:
    def test_empty_loss_site_always_gains(self):
        params = SystemParams(N0=5, gamma_loss=1.0)
        for u in (0.0, 0.3, 0.999):
            assert select_jump_channel(SectorState.basis(0, 5), params, u) is JumpChannel.GAIN_SITE2

    def test_equal_rates_split_at_one_half(self):
        params = SystemParams(N0=1, g=0.0, gamma_loss=1.0, gamma_gain_override=1.0)
        state = SectorState.basis(1, 0)
        assert select_jump_channel(state, params, 0.49) is JumpChannel.LOSS_SITE1
        assert select_jump_channel(state, params, 0.5) is JumpChannel.GAIN_SITE2

    def test_balanced_state_has_equal_odds(self, figure_pair):
        # gamma_loss * 50 against gamma_loss * (100/102) * 51
        params = SystemParams(N0=100, gamma_loss=1.5)
        state = build_product_state(*figure_pair, 100)
        assert select_jump_channel(state, params, 0.5 - 1e-9) is JumpChannel.LOSS_SITE1
        assert select_jump_channel(state, params, 0.5 + 1e-9) is JumpChannel.GAIN_SITE2

    def test_closed_channels(self):
        with pytest.raises(JumpLogicError):
            select_jump_channel(SectorState.basis(1, 0), SystemParams(N0=1, g=0.0), 0.1)


class TestApplyJump:
    def test_loss(self):
        result = apply_jump(SectorState.basis(1, 1), JumpChannel.LOSS_SITE1)
        assert result.n_total == 1
        assert_allclose(result.amplitudes, [0, 1])

    def test_gain_on_vacuum(self):
        result = apply_jump(SectorState.basis(0, 0), JumpChannel.GAIN_SITE2)
        assert_allclose(result.amplitudes, [0, 1])

    def test_gain_on_superposition(self):
        state = SectorState(1, [1, 1]) * (1 / SQRT2)
        result = apply_jump(state, JumpChannel.GAIN_SITE2)
        assert_allclose(result.amplitudes, np.array([0, 1, SQRT2]) / math.sqrt(3.0))
        assert result.is_normalized()

    def test_loss_from_empty_site_is_rejected(self):
        with pytest.raises(JumpLogicError):
            apply_jump(SectorState.basis(0, 3), JumpChannel.LOSS_SITE1)


class TestTrajectoryConfig:
    def test_rejects_unnormalized_initial_state(self, small_params):
        with pytest.raises(InputValidationError):
            small_config(small_params, SectorState(1, [1.0, 1.0]))

    def test_rejects_sample_interval_below_step(self, small_params, small_state):
        with pytest.raises(InputValidationError):
            small_config(small_params, small_state, sample_interval=1e-4)


class TestLocateJump:
    def test_norm_hits_threshold(self, small_state):
        params = SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=2.0)
        hamiltonian = EffectiveHamiltonian(params)
        psi = small_state.amplitudes
        h = 0.05
        norm_end = norm_squared(hamiltonian.rk4_step(psi, h))
        threshold = 0.5 * (1.0 + norm_end)
        tau, trial = _locate_jump(hamiltonian, psi, h, norm_end, threshold)
        assert 0.0 < tau < h
        assert abs(norm_squared(trial) - threshold) < JUMP_TIME_TOLERANCE * threshold


class TestRunTrajectory:
    def test_closed_system_never_jumps(self, figure_pair):
        params = SystemParams(J=1.0, g=0.5, N0=10, gamma_loss=0.0)
        series = run_trajectory(small_config(params, build_product_state(*figure_pair, 10)), 0)
        assert series.n_gains == series.n_losses == 0
        assert series.final_sector == 10
        assert_allclose(series.n_total, 10.0, atol=1e-12)

    def test_pure_limit_keeps_purity(self, figure_pair):
        params = SystemParams(J=1.0, g=0.0, N0=8, gamma_loss=0.0)
        series = run_trajectory(small_config(params, build_product_state(*figure_pair, 8), t_final=2.0), 3)
        purity, _, _ = observable_arrays(series.m11, series.m22, series.m12)
        assert_allclose(purity, 1.0, atol=1e-12)

    def test_fixed_seed_is_bit_identical(self, small_params, small_state):
        config = small_config(small_params, small_state, t_final=2.0)
        first, second = run_trajectory(config, 5), run_trajectory(config, 5)
        assert_array_equal(first.m11, second.m11)
        assert_array_equal(first.m12, second.m12)
        assert first.n_gains == second.n_gains and first.n_losses == second.n_losses

    def test_sector_bookkeeping(self, small_state):
        params = SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=1.5)
        series = run_trajectory(small_config(params, small_state, t_final=3.0), 1)
        assert series.n_gains + series.n_losses > 0
        assert series.final_sector == 6 + series.n_gains - series.n_losses
        assert series.n_total[-1] == pytest.approx(series.final_sector)

    def test_records_on_sample_grid(self, small_params, small_state):
        series = run_trajectory(small_config(small_params, small_state, t_final=0.105, sample_interval=0.01), 0)
        assert len(series) == 12
        assert series.t[-1] == pytest.approx(0.105)

    def test_mean_first_jump_time(self):
        # J = U = 0 from |1,0>: loss and gain both fire at rate 1
        params = SystemParams(J=0.0, g=0.0, N0=1, gamma_loss=1.0, gamma_gain_override=1.0)
        config = TrajectoryConfig(
            params=params, initial=SectorState.basis(1, 0), t_final=8.0,
            sample_interval=0.01, rk_step=0.01, master_seed=7, n_trajectories=1000,
        )
        first_jumps = []
        for index in range(config.n_trajectories):
            series = run_trajectory(config, index)
            changed = np.flatnonzero((series.m11 != 1.0) | (series.m22 != 0.0))
            assert len(changed) > 0
            first_jumps.append(series.t[changed[0]] - 0.5 * config.sample_interval)
        mean = np.mean(first_jumps)
        band = 3.0 * 0.5 / math.sqrt(config.n_trajectories)
        assert abs(mean - 0.5) < band


class TestAverageEnsemble:
    def _series(self, m11, t=(0.0, 1.0)):
        return MomentSeries(t=list(t), m11=[m11] * len(t), m22=[1.0] * len(t), m12=[0.0] * len(t))

    def test_single_trajectory_is_identity(self):
        ensemble = average_ensemble([self._series(2.0)])
        assert_allclose(ensemble.series.m11, [2.0, 2.0])
        assert_allclose(ensemble.stderr_n_total, 0.0)

    def test_arithmetic_mean(self):
        ensemble = average_ensemble([self._series(1.0), self._series(3.0)])
        assert_allclose(ensemble.series.m11, [2.0, 2.0])
        assert_allclose(ensemble.stderr_n_total, 1.0)
        assert ensemble.n_trajectories == 2

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            average_ensemble([self._series(1.0), self._series(1.0, t=(0.0, 0.5))])

    def test_empty(self):
        with pytest.raises(InputValidationError):
            average_ensemble([])


class TestRunEnsemble:
    def test_worker_count_does_not_change_results(self, small_state):
        params = SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=1.0)
        config = small_config(params, small_state, t_final=1.0, n_trajectories=6, master_seed=11)
        serial = run_ensemble(config, workers=1)
        parallel = run_ensemble(config, workers=2)
        assert_array_equal(serial.series.m11, parallel.series.m11)
        assert_array_equal(serial.series.m12, parallel.series.m12)
        assert_array_equal(serial.stderr_n_total, parallel.stderr_n_total)
        assert serial.total_jumps == parallel.total_jumps

    def test_seed_changes_results(self, small_state):
        params = SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=1.5)
        first = run_ensemble(small_config(params, small_state, t_final=2.0, master_seed=1), workers=1)
        second = run_ensemble(small_config(params, small_state, t_final=2.0, master_seed=2), workers=1)
        assert not np.array_equal(first.series.m11, second.series.m11)

    def test_balanced_ensemble_holds_particle_number_at_start(self, figure_pair):
        params = SystemParams(J=1.0, g=0.5, N0=100, gamma_loss=0.5)
        config = TrajectoryConfig(
            params=params, initial=build_product_state(*figure_pair, 100),
            t_final=0.02, sample_interval=0.01, n_trajectories=2000, master_seed=5,
        )
        ensemble = run_ensemble(config, workers=1)
        assert ensemble.total_jumps > 0
        stderr = ensemble.stderr_n_total[-1]
        assert stderr > 0.0
        assert abs(ensemble.series.n_total[-1] - 100.0) < 3.0 * stderr
