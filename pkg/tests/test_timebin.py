"""Time-bin benchmark: closed-form probabilities vs a Wigner-integral oracle."""

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import eval_laguerre, i0e

from conftest import random_transducer_params
from mwlink.gaussian import TransducerParams, UVWTriple, transducer_covariance
from mwlink.timebin import (
    TimebinOutcome,
    fock_probabilities,
    heralded_state,
    timebin_rate,
    timebin_rci,
    timebin_rci_matrix_route,
)


def wigner_probability(uvw: UVWTriple, n1: int, n2: int) -> float:
    """P(n1, n2) by integrating the product of Wigner functions.

    The angular dependence reduces to a Bessel I0 factor, leaving a 2D radial
    integral; I0 is evaluated in exponentially-scaled form for stability.
    """
    u, v, w = uvw.u, uvw.v, uvw.w
    det = u * w - v**2

    def integrand(r2, r1):
        bessel_arg = 2.0 * v * r1 * r2 / det
        gauss = np.exp(
            -(w * r1**2 + u * r2**2) / det - r1**2 - r2**2 + bessel_arg
        )
        return (
            r1
            * r2
            * gauss
            * i0e(bessel_arg)
            * eval_laguerre(n1, 2.0 * r1**2)
            * eval_laguerre(n2, 2.0 * r2**2)
        )

    val, _ = dblquad(integrand, 0.0, 8.0, 0.0, 8.0, epsabs=1e-10, epsrel=1e-10)
    return 16.0 / det * (-1.0) ** (n1 + n2) * val


class TestFockProbabilities:
    def test_vacuum(self):
        assert fock_probabilities(UVWTriple(1.0, 0.0, 1.0)) == (1.0, 0.0, 0.0, 0.0)

    def test_sum_at_most_one(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            probs = fock_probabilities(
                transducer_covariance(random_transducer_params(rng))
            )
            assert all(0.0 <= p <= 1.0 for p in probs)
            assert sum(probs) <= 1.0 + 1e-12

    def test_wigner_oracle_agreement(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            uvw = transducer_covariance(random_transducer_params(rng))
            probs = fock_probabilities(uvw)
            for (n1, n2), p in zip(((0, 0), (0, 1), (1, 0), (1, 1)), probs):
                assert p == pytest.approx(
                    wigner_probability(uvw, n1, n2), abs=1e-6
                )


class TestHeraldedState:
    def test_no_vacuum_contamination_gives_pure_bell(self):
        outcome = heralded_state((0.5, 0.0, 0.0, 0.5))
        assert outcome.lambda1 == 1.0
        assert outcome.f_sp == 1.0

    def test_no_pair_emission_gives_zero_fidelity(self):
        outcome = heralded_state((0.5, 0.5, 0.0, 0.0))
        assert outcome.lambda1 == 0.0
        assert outcome.f_sp == 0.0

    def test_success_probability_closed_form(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            uvw = transducer_covariance(random_transducer_params(rng))
            p00, p01, p10, p11 = fock_probabilities(uvw)
            outcome = heralded_state((p00, p01, p10, p11))
            z = p11**2 + 2.0 * p01 * p11 + p01**2
            assert outcome.p_success == pytest.approx(z / 2.0, abs=1e-15)

    def test_zero_heralding_rejected(self):
        with pytest.raises(ValueError):
            heralded_state((1.0, 0.0, 0.0, 0.0))

    def test_weight_normalization_enforced(self):
        with pytest.raises(ValueError):
            TimebinOutcome(0.5, 0.2, 0.2, 0.1, 0.5, 0.1, 0.1, 0.1, 0.5)


class TestTimebinRci:
    def test_pure_bell(self):
        outcome = heralded_state((0.5, 0.0, 0.0, 0.5))
        assert timebin_rci(outcome) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_product(self):
        outcome = heralded_state((0.5, 0.5, 0.0, 0.0))
        assert timebin_rci(outcome) == pytest.approx(0.0, abs=1e-12)

    def test_matches_density_matrix_route(self):
        rng = np.random.default_rng(34)
        for _ in range(20):
            uvw = transducer_covariance(random_transducer_params(rng))
            outcome = heralded_state(fock_probabilities(uvw))
            assert timebin_rci(outcome) == pytest.approx(
                timebin_rci_matrix_route(outcome), abs=1e-9
            )


class TestTimebinRate:
    def test_pure_bell_rate(self):
        outcome = heralded_state((0.5, 0.0, 0.0, 0.5))
        # p_success = Z/2 = 1/8 for these probabilities
        assert timebin_rate(outcome, "rci") == pytest.approx(outcome.p_success / 2.0)
        assert timebin_rate(outcome, "eof_upper") == pytest.approx(
            outcome.p_success / 2.0
        )

    def test_eof_upper_dominates_rci(self):
        rng = np.random.default_rng(35)
        for _ in range(30):
            uvw = transducer_covariance(random_transducer_params(rng))
            outcome = heralded_state(fock_probabilities(uvw))
            assert timebin_rate(outcome, "eof_upper") >= timebin_rate(outcome, "rci")

    def test_unknown_measure_rejected(self):
        outcome = heralded_state((0.5, 0.0, 0.0, 0.5))
        with pytest.raises(ValueError):
            timebin_rate(outcome, "negativity")
