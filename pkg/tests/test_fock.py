import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from physics.errors import DomainError, InputValidationError
from physics.fock import (
    SectorState,
    SystemParams,
    apply_annihilation,
    apply_creation,
    build_product_state,
    log_binomial,
    norm_squared,
    number_expectation,
)

SQRT2 = math.sqrt(2.0)


class TestSystemParams:
    def test_gain_balances_loss(self):
        params = SystemParams(N0=100, gamma_loss=1.5)
        assert params.gamma_gain == pytest.approx(1.5 * 100 / 102)
        assert params.gamma_gain / params.gamma_loss == pytest.approx(100 / 102, rel=1e-15)

    def test_interaction_from_macroscopic_strength(self):
        assert SystemParams(g=0.5, N0=101).U == pytest.approx(0.005)

    def test_single_particle_requires_no_interaction(self):
        with pytest.raises(InputValidationError):
            SystemParams(g=0.5, N0=1)
        assert SystemParams(g=0.0, N0=1).U == 0.0

    def test_rejects_invalid_values(self):
        with pytest.raises(DomainError):
            SystemParams(N0=0)
        with pytest.raises(DomainError):
            SystemParams(N0=2.5)
        with pytest.raises(InputValidationError):
            SystemParams(gamma_loss=-0.1)

    def test_gain_override(self):
        params = SystemParams(N0=10, gamma_loss=0.0, gamma_gain_override=1.0)
        assert params.gamma_gain == 1.0


class TestSectorState:
    def test_length_must_match_sector(self):
        with pytest.raises(InputValidationError):
            SectorState(2, np.ones(2))

    def test_amplitudes_are_read_only(self):
        state = SectorState.basis(1, 1)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_basis_index_is_second_site_occupation(self):
        state = SectorState.basis(2, 1)
        assert state.n_total == 3
        assert_allclose(state.amplitudes, [0, 1, 0, 0])

    def test_normalized(self):
        state = SectorState(1, [3.0, 4.0]).normalized()
        assert state.is_normalized()
        assert_allclose(state.amplitudes, [0.6, 0.8])
        with pytest.raises(DomainError):
            SectorState.zero(3).normalized()

    def test_arithmetic_stays_in_sector(self):
        total = SectorState.basis(1, 0) + SectorState.basis(0, 1)
        assert_allclose((total * 0.5).amplitudes, [0.5, 0.5])
        with pytest.raises(InputValidationError):
            SectorState.basis(1, 0) + SectorState.basis(1, 1)


class TestBuildProductState:
    def test_all_particles_on_site_one(self):
        assert_allclose(build_product_state(1, 0, 1).amplitudes, [1, 0])

    def test_binomial_expansion(self):
        state = build_product_state(1 / SQRT2, 1 / SQRT2, 2)
        assert_allclose(state.amplitudes, [0.5, 1 / SQRT2, 0.5], atol=1e-15)

    def test_all_particles_on_site_two(self):
        assert_allclose(build_product_state(0, 1, 3).amplitudes, [0, 0, 0, 1])

    def test_large_particle_number_is_normalized(self, figure_pair):
        state = build_product_state(*figure_pair, 1000)
        assert state.is_normalized()
        assert np.all(np.isfinite(state.amplitudes))

    def test_phases_follow_the_mode(self, figure_pair):
        c1, c2 = figure_pair
        state = build_product_state(c1, c2, 3)
        expected = [math.sqrt(math.comb(3, m)) * c1 ** (3 - m) * c2 ** m for m in range(4)]
        assert_allclose(state.amplitudes, expected, atol=1e-14)

    def test_rejects_unnormalized_pair(self):
        with pytest.raises(InputValidationError):
            build_product_state(1, 1, 4)

    def test_rejects_invalid_particle_number(self):
        with pytest.raises(DomainError):
            build_product_state(1, 0, 0)


class TestLadderOperators:
    def test_annihilation_site_one(self):
        result = apply_annihilation(1, SectorState.basis(2, 1))
        assert result.n_total == 2
        assert_allclose(result.amplitudes, SQRT2 * SectorState.basis(1, 1).amplitudes)

    def test_annihilation_of_empty_site_gives_zero(self):
        result = apply_annihilation(1, SectorState.basis(0, 3))
        assert result.n_total == 2
        assert norm_squared(result) == 0.0

    def test_annihilation_site_two_on_superposition(self):
        state = SectorState(2, [0, 1, 1]) * (1 / SQRT2)
        result = apply_annihilation(2, state)
        assert_allclose(result.amplitudes, np.array([1, SQRT2]) / SQRT2)

    def test_annihilation_on_vacuum(self):
        result = apply_annihilation(2, SectorState.basis(0, 0))
        assert result.n_total == 0
        assert norm_squared(result) == 0.0

    @pytest.mark.parametrize("site, n1, n2, factor, e1, e2", [
        (2, 1, 1, SQRT2, 1, 2),
        (2, 0, 0, 1.0, 0, 1),
        (1, 3, 0, 2.0, 4, 0),
    ])
    def test_creation(self, site, n1, n2, factor, e1, e2):
        result = apply_creation(site, SectorState.basis(n1, n2))
        assert_allclose(result.amplitudes, factor * SectorState.basis(e1, e2).amplitudes)

    def test_invalid_site(self):
        with pytest.raises(InputValidationError):
            apply_creation(3, SectorState.basis(1, 0))

    def test_commutator_on_random_state(self, rng):
        amplitudes = rng.normal(size=6) + 1j * rng.normal(size=6)
        state = SectorState(5, amplitudes)
        for site in (1, 2):
            commutator = apply_annihilation(site, apply_creation(site, state)) - apply_creation(
                site, apply_annihilation(site, state)
            )
            assert_allclose(commutator.amplitudes, state.amplitudes, atol=1e-12)


class TestNorms:
    def test_norm_squared(self, figure_pair):
        assert norm_squared(build_product_state(*figure_pair, 10)) == pytest.approx(1.0)
        assert norm_squared(SectorState.zero(4)) == 0.0
        assert norm_squared(SectorState(1, np.array([1, 1]) / SQRT2) * 2) == pytest.approx(4.0)

    def test_number_expectation_of_product_state(self, figure_pair):
        state = build_product_state(*figure_pair, 20)
        assert number_expectation(1, state) == pytest.approx(10.0)
        assert number_expectation(2, state) == pytest.approx(10.0)

    @pytest.mark.parametrize("n_total", [0, 1, 7, 40])
    def test_ladder_norms_match_occupations(self, rng, n_total):
        for _ in range(5):
            amplitudes = rng.normal(size=n_total + 1) + 1j * rng.normal(size=n_total + 1)
            state = SectorState(n_total, amplitudes).normalized()
            for site in (1, 2):
                occupation = number_expectation(site, state)
                assert norm_squared(apply_annihilation(site, state)) == pytest.approx(occupation, rel=1e-12, abs=1e-14)
                assert norm_squared(apply_creation(site, state)) == pytest.approx(occupation + 1.0, rel=1e-12)

    def test_log_binomial(self):
        assert_allclose(np.exp(log_binomial(5, [0, 2, 5])), [1, 10, 1])
