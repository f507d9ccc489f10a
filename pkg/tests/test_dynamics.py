import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from physics.dynamics import (
    EffectiveHamiltonian,
    apply_effective_hamiltonian,
    apply_hamiltonian,
    decay_rate,
    evolve_between_jumps,
)
from physics.errors import DomainError, InputValidationError
from physics.fock import SectorState, SystemParams, build_product_state, norm_squared, number_expectation

SQRT2 = math.sqrt(2.0)


def random_state(rng, n_total):
    return SectorState(n_total, rng.normal(size=n_total + 1) + 1j * rng.normal(size=n_total + 1))


class TestHamiltonian:
    def test_single_particle_hopping(self):
        result = apply_hamiltonian(SectorState.basis(1, 0), SystemParams(J=1.0, g=0.0, N0=1))
        assert_allclose(result.amplitudes, [0, -1])

    def test_hopping_in_two_particle_sector(self):
        result = apply_hamiltonian(SectorState.basis(1, 1), SystemParams(J=1.0, g=0.0, N0=2))
        assert_allclose(result.amplitudes, [-SQRT2, 0, -SQRT2])

    def test_on_site_interaction(self):
        # U = g / (N0 - 1) = 1
        params = SystemParams(J=0.0, g=1.0, N0=2)
        result = apply_hamiltonian(SectorState.basis(2, 0), params)
        assert_allclose(result.amplitudes, [1, 0, 0])

    def test_preserves_sector(self, rng, small_params):
        state = random_state(rng, 7)
        assert apply_hamiltonian(state, small_params).n_total == 7

    def test_hermitian(self, rng, small_params):
        phi, psi = random_state(rng, 9), random_state(rng, 9)
        left = np.vdot(phi.amplitudes, apply_hamiltonian(psi, small_params).amplitudes)
        right = np.vdot(psi.amplitudes, apply_hamiltonian(phi, small_params).amplitudes)
        assert abs(left - np.conj(right)) < 1e-12


class TestEffectiveHamiltonian:
    def test_hermitian_limit(self, rng):
        params = SystemParams(J=1.0, g=0.5, N0=8, gamma_loss=0.0)
        state = random_state(rng, 8)
        assert_allclose(
            apply_effective_hamiltonian(state, params).amplitudes,
            apply_hamiltonian(state, params).amplitudes,
        )

    def test_loss_decay_term(self):
        params = SystemParams(J=0.0, g=0.0, N0=2, gamma_loss=1.0, gamma_gain_override=0.0)
        result = apply_effective_hamiltonian(SectorState.basis(2, 0), params)
        assert_allclose(result.amplitudes, [-1j, 0, 0])

    def test_gain_decay_term_on_empty_site(self):
        params = SystemParams(J=0.0, g=0.0, N0=1, gamma_loss=0.0, gamma_gain_override=1.0)
        result = apply_effective_hamiltonian(SectorState.basis(1, 0), params)
        assert_allclose(result.amplitudes, [-0.5j, 0])

    def test_decay_rate_is_norm_loss_rate(self, small_params, small_state):
        hamiltonian = EffectiveHamiltonian(small_params)
        psi = small_state.amplitudes
        d_norm = 2.0 * np.vdot(psi, hamiltonian.derivative(psi)).real
        assert d_norm == pytest.approx(-decay_rate(small_state, small_params), rel=1e-12)

    def test_rk4_is_fourth_order(self, small_params, small_state):
        hamiltonian = EffectiveHamiltonian(small_params)

        def propagate(h, span=1.0):
            psi = small_state.amplitudes
            for _ in range(int(round(span / h))):
                psi = hamiltonian.rk4_step(psi, h)
            return psi

        reference = propagate(0.02 / 16)
        coarse = np.linalg.norm(propagate(0.02) - reference)
        fine = np.linalg.norm(propagate(0.01) - reference)
        assert 12.0 < coarse / fine < 20.0

    def test_rk4_step_matches_generic_derivative(self, small_params, small_state):
        hamiltonian = EffectiveHamiltonian(small_params)
        psi = small_state.amplitudes
        h = 1e-3
        k1 = hamiltonian.derivative(psi)
        k2 = hamiltonian.derivative(psi + 0.5 * h * k1)
        k3 = hamiltonian.derivative(psi + 0.5 * h * k2)
        k4 = hamiltonian.derivative(psi + h * k3)
        expected = psi + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        assert_allclose(hamiltonian.rk4_step(psi, h), expected, atol=1e-15)


class TestEvolveBetweenJumps:
    def test_rabi_transfer(self):
        params = SystemParams(J=1.0, g=0.0, N0=1)
        samples = evolve_between_jumps(SectorState.basis(1, 0), (0.0, math.pi / 2), params, step=1e-3)
        t_final, state = samples[-1]
        assert t_final == pytest.approx(math.pi / 2)
        assert number_expectation(2, state) == pytest.approx(1.0, abs=1e-8)

    def test_norm_strictly_decreasing_with_loss(self, small_state):
        params = SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=1.0)
        norms = [norm_squared(state) for _, state in evolve_between_jumps(small_state, (0.0, 1.0), params)]
        assert np.all(np.diff(norms) < 0)

    def test_norm_loss_follows_decay_rate(self, small_params, small_state):
        h = 1e-3
        samples = evolve_between_jumps(small_state, (0.0, 0.05), small_params, step=h)
        norms = np.array([norm_squared(state) for _, state in samples])
        slopes = (norms[2:] - norms[:-2]) / (2 * h)
        rates = np.array([decay_rate(state, small_params) for _, state in samples[1:-1]])
        assert_allclose(slopes, -rates, rtol=1e-3)

    def test_zero_length_span_is_identity(self, small_params, small_state):
        samples = evolve_between_jumps(small_state, (2.0, 2.0), small_params)
        assert len(samples) == 1
        t, state = samples[0]
        assert t == 2.0
        assert_allclose(state.amplitudes, small_state.amplitudes)

    def test_time_offset_and_shortened_last_step(self, small_params, small_state):
        samples = evolve_between_jumps(small_state, (1.0, 1.0025), small_params, step=1e-3)
        assert_allclose([t for t, _ in samples], [1.0, 1.001, 1.002, 1.0025])

    def test_rejects_bad_arguments(self, small_params, small_state):
        with pytest.raises(DomainError):
            evolve_between_jumps(small_state, (1.0, 0.0), small_params)
        with pytest.raises(DomainError):
            evolve_between_jumps(small_state, (0.0, 1.0), small_params, step=0.0)
        with pytest.raises(InputValidationError):
            evolve_between_jumps(small_state * 2.0, (0.0, 1.0), small_params)

    def test_unitary_when_closed(self):
        params = SystemParams(J=1.0, g=0.5, N0=10)
        state = build_product_state(0.6, 0.8j, 10)
        _, final = evolve_between_jumps(state, (0.0, 3.0), params)[-1]
        assert norm_squared(final) == pytest.approx(1.0, abs=1e-9)
