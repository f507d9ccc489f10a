"""Shared fixtures; puts src/ and the project root on sys.path like the scripts do."""

import os
import sys

import numpy as np
import pytest

project_root = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.join(project_root, 'src'))
sys.path.insert(0, project_root)

from physics.fock import SystemParams, build_product_state  # noqa: E402

FIGURE_PAIR = (0.5 + 0.5j, 0.5 - 0.5j)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def figure_pair():
    """Single-particle mode (0.5 + 0.5i, 0.5 - 0.5i) used by the purity-oscillation runs"""
    return FIGURE_PAIR


@pytest.fixture
def small_params():
    return SystemParams(J=1.0, g=0.5, N0=6, gamma_loss=0.5)


@pytest.fixture
def small_state(small_params, figure_pair):
    return build_product_state(*figure_pair, small_params.N0)
