"""Shared fixtures: reference parameter sets and derived states."""

import numpy as np
import pytest

from mwlink.gaussian import TransducerParams, cv_swap, transducer_covariance

IDEAL = TransducerParams(cooperativity=0.1, zeta_o=1.0, zeta_m=1.0, n_in=0.0)
LOSSY = TransducerParams(cooperativity=0.1, zeta_o=0.9, zeta_m=0.95, n_in=0.2)
FIG3 = TransducerParams(cooperativity=0.1, zeta_o=0.99, zeta_m=0.992, n_in=0.2)


@pytest.fixture
def ideal_params():
    return IDEAL


@pytest.fixture
def lossy_params():
    return LOSSY


@pytest.fixture
def fig3_params():
    return FIG3


@pytest.fixture
def fig3_swap_state():
    state, _ = cv_swap(transducer_covariance(FIG3))
    return state


def random_transducer_params(rng: np.random.Generator) -> TransducerParams:
    """Random physical operating point, biased away from degenerate corners."""
    return TransducerParams(
        cooperativity=rng.uniform(0.01, 0.6),
        zeta_o=rng.uniform(0.3, 1.0),
        zeta_m=rng.uniform(0.3, 1.0),
        n_in=rng.uniform(0.0, 1.0),
    )


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Full-rank random density matrix from a Ginibre draw."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
