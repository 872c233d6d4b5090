"""Training: cost function, finite differences, Adam descent, records."""

import json

import numpy as np
import pytest

from mwlink.fock import gaussian_to_fock
from mwlink.gaussian import cv_swap, transducer_covariance
from mwlink.hybrid import HybridEvaluator
from mwlink.training import (
    TrainConfig,
    TrainRecord,
    adam_train,
    cost_from_pf,
    gradient,
    hyperparameter_grid,
    init_hybrid_params,
    read_records,
    softplus,
    write_records,
)


@pytest.fixture(scope="module")
def toy_evaluator():
    from conftest import FIG3

    state, _ = cv_swap(transducer_covariance(FIG3))
    return HybridEvaluator(gaussian_to_fock(state, 6), n_th=3)


class TestSoftplus:
    def test_at_zero(self):
        assert softplus(0.0, 20.0) == pytest.approx(np.log(2.0) / 20.0, abs=1e-12)

    def test_large_positive_asymptote(self):
        assert softplus(5.0, 20.0) == pytest.approx(5.0, abs=1e-12)

    def test_large_negative_asymptote(self):
        val = softplus(-5.0, 20.0)
        assert 0.0 < val < 1e-12 or val == 0.0

    def test_no_overflow(self):
        assert np.isfinite(softplus(1e6, 20.0))
        assert np.isfinite(softplus(-1e6, 20.0))


class TestCost:
    def test_at_critical_fidelity(self):
        cfg = TrainConfig(depth=1, lambda_penalty=3.0, f_critical=0.9)
        assert cost_from_pf(0.0, 0.9, cfg) == pytest.approx(
            1.0 + 3.0 * np.log(2.0) / 20.0, abs=1e-12
        )

    def test_perfect_point(self):
        cfg = TrainConfig(depth=1, lambda_penalty=3.0, f_critical=0.9)
        expected = 3.0 * np.log1p(np.exp(-2.0)) / 20.0
        assert cost_from_pf(1.0, 1.0, cfg) == pytest.approx(expected, abs=1e-12)

    def test_monotone_in_fidelity(self):
        cfg = TrainConfig(depth=1)
        costs = [cost_from_pf(0.5, f, cfg) for f in np.linspace(0.8, 1.0, 20)]
        assert all(b < a for a, b in zip(costs, costs[1:]))


class TestGradient:
    def test_quadratic_exact(self):
        objective = lambda x: float(np.sum(x**2))
        x = np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(gradient(objective, x), 2.0 * x, atol=1e-7)

    def test_constant_zero(self):
        np.testing.assert_allclose(
            gradient(lambda x: 3.0, np.ones(4)), np.zeros(4), atol=1e-12
        )

    def test_richardson_consistency(self, toy_evaluator):
        cfg = TrainConfig(depth=2, cutoff=6, n_th=3)
        rng = np.random.default_rng(71)

        def objective(vec):
            p, f = toy_evaluator.evaluate(vec)[:2]
            return cost_from_pf(p, f, cfg)

        x = init_hybrid_params(rng, 2)
        g_h = gradient(objective, x, 1e-4)
        g_h2 = gradient(objective, x, 5e-5)
        g_h4 = gradient(objective, x, 2.5e-5)
        assert np.all(
            np.abs(g_h - g_h2) < 4.0 * np.abs(g_h2 - g_h4) + 1e-8
        )

    def test_batched_path_matches_reference(self, toy_evaluator):
        cfg = TrainConfig(depth=2, cutoff=6, n_th=3)
        rng = np.random.default_rng(72)
        x = init_hybrid_params(rng, 2)

        def objective(vec):
            p, f = toy_evaluator.evaluate(vec)[:2]
            return cost_from_pf(p, f, cfg)

        from mwlink.training import _fast_gradient

        g_ref = gradient(objective, x, 1e-4)
        _, g_fast = _fast_gradient(cfg, toy_evaluator, x, 1e-4)
        np.testing.assert_allclose(
            g_fast, g_ref, atol=1e-5, rtol=1e-3
        )


class TestAdamTrain:
    def test_deterministic_given_seed(self, toy_evaluator):
        cfg = TrainConfig(depth=2, steps=20, restarts=2, seed=9, cutoff=6, n_th=3)
        run = lambda: adam_train(
            cfg, toy_evaluator, lambda rng: init_hybrid_params(rng, cfg.depth)
        )
        first, second = run(), run()
        for a, b in zip(first, second):
            assert a.to_json() == b.to_json()

    def test_records_reproducible_from_params(self, toy_evaluator):
        cfg = TrainConfig(depth=2, steps=20, restarts=1, seed=3, cutoff=6, n_th=3)
        (rec,) = adam_train(
            cfg, toy_evaluator, lambda rng: init_hybrid_params(rng, cfg.depth)
        )
        p, f = toy_evaluator.evaluate(np.asarray(rec.params))[:2]
        assert p == pytest.approx(rec.p_success, abs=1e-10)
        assert f == pytest.approx(rec.fidelity, abs=1e-10)

    def test_best_cost_envelope_non_increasing(self, toy_evaluator):
        cfg = TrainConfig(
            depth=2, steps=300, restarts=1, seed=4, cutoff=6, n_th=3, log_every=50
        )
        (rec,) = adam_train(
            cfg, toy_evaluator, lambda rng: init_hybrid_params(rng, cfg.depth)
        )
        hist = rec.best_cost_history
        assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))
        assert rec.best_cost <= rec.initial_cost

    def test_lambda_zero_drives_success_probability(self, toy_evaluator):
        cfg = TrainConfig(
            depth=2, steps=2000, restarts=2, seed=1, cutoff=6, n_th=3,
            lambda_penalty=0.0,
        )
        records = adam_train(
            cfg, toy_evaluator, lambda rng: init_hybrid_params(rng, cfg.depth)
        )
        assert max(rec.p_success for rec in records) > 0.99


class TestRecords:
    def test_roundtrip_through_file(self, tmp_path):
        rec = TrainRecord(
            restart=0,
            lambda_penalty=10.0,
            f_critical=0.95,
            status="ok",
            initial_cost=2.0,
            best_cost=1.0,
            final_cost=1.1,
            p_success=0.5,
            fidelity=0.9,
            params=[0.1, 0.2],
            steps=10,
            best_cost_history=[2.0, 1.0],
        )
        path = tmp_path / "records.jsonl"
        write_records(path, [rec])
        (back,) = read_records(path)
        assert back == rec

    def test_header_lines_skipped(self, tmp_path):
        path = tmp_path / "records.jsonl"
        rec = TrainRecord(
            restart=0, lambda_penalty=1.0, f_critical=0.9, status="ok",
            initial_cost=1.0, best_cost=0.5, final_cost=0.5, p_success=0.7,
            fidelity=0.8, params=[], steps=1,
        )
        with open(path, "w") as fh:
            fh.write(json.dumps({"_header": {"seed": 0}}) + "\n")
            fh.write(rec.to_json() + "\n")
        assert read_records(path) == [rec]

    def test_wall_time_not_serialized(self):
        rec = TrainRecord(
            restart=0, lambda_penalty=1.0, f_critical=0.9, status="ok",
            initial_cost=1.0, best_cost=0.5, final_cost=0.5, p_success=0.7,
            fidelity=0.8, params=[], steps=1, wall_time=123.0,
        )
        assert "wall_time" not in json.loads(rec.to_json())


class TestConfig:
    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            TrainConfig(depth=0)
        with pytest.raises(ValueError):
            TrainConfig(depth=1, f_critical=1.5)
        with pytest.raises(ValueError):
            TrainConfig(depth=1, learning_rate=-1.0)

    def test_grid_coverage(self):
        grid = hyperparameter_grid()
        assert len(grid) == 20
        assert (10.0, 0.95) in grid
