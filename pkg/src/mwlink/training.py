"""Variational training: cost function, finite-difference gradients, Adam.

Training is deterministic given (seed, config): restart k draws its
initialization from an RNG seeded with [seed, k], and Adam itself is
noise-free.  The protocol evaluator must be a pure function of the
parameter vector.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training job."""

    depth: int
    steps: int = 5000
    restarts: int = 20
    learning_rate: float = 0.001
    lambda_penalty: float = 10.0
    f_critical: float = 0.95
    gamma_softplus: float = 20.0
    seed: int = 0
    cutoff: int = 10
    n_th: int = 5
    log_every: int = 100

    def __post_init__(self):
        if self.steps < 1 or self.restarts < 1 or self.depth < 1:
            raise ValueError("steps, restarts and depth must be >= 1")
        for name in ("learning_rate", "lambda_penalty", "gamma_softplus"):
            if not np.isfinite(getattr(self, name)) or getattr(self, name) < 0:
                raise ValueError(f"{name} must be finite and >= 0")
        if not 0.0 <= self.f_critical <= 1.0:
            raise ValueError("f_critical must be in [0, 1]")


@dataclass
class TrainRecord:
    """Summary of one restart; wall_time is informational and not serialized."""

    restart: int
    lambda_penalty: float
    f_critical: float
    status: str
    initial_cost: float
    best_cost: float
    final_cost: float
    p_success: float
    fidelity: float
    params: list[float]
    steps: int
    best_cost_history: list[float] = field(default_factory=list)
    wall_time: float = 0.0

    def to_json(self) -> str:
        payload = asdict(self)
        payload.pop("wall_time")
        return json.dumps(payload)

    @classmethod
    def from_json(cls, line: str) -> "TrainRecord":
        return cls(**json.loads(line))


def softplus(x: float, gamma: float = 20.0) -> float:
    """log(1 + exp(gamma x)) / gamma, overflow-safe for large |gamma x|."""
    gx = gamma * x
    return max(x, 0.0) + np.log1p(np.exp(-abs(gx))) / gamma


def cost_from_pf(p_success: float, fidelity: float, cfg: TrainConfig) -> float:
    """(1 - P_success) + lambda * Softplus(F_c - F)."""
    return (1.0 - p_success) + cfg.lambda_penalty * softplus(
        cfg.f_critical - fidelity, cfg.gamma_softplus
    )


def gradient(objective, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central finite-difference gradient; the reference for any alternative."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        f_plus = objective(x + step)
        f_minus = objective(x - step)
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise FloatingPointError("objective is not finite near the base point")
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def init_hybrid_params(rng: np.random.Generator, depth: int) -> np.ndarray:
    """Random ECD-circuit initialization: uniform angles, small displacements."""
    vec = np.empty(4 * depth + 4)
    for k in range(depth + 1):
        vec[4 * k : 4 * k + 2] = rng.uniform(-np.pi, np.pi, size=2)
        vec[4 * k + 2 : 4 * k + 4] = rng.normal(0.0, 0.5, size=2)
    return vec


def init_dv_params(rng: np.random.Generator, n_layers: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=8 * n_layers)


def adam_train(cfg: TrainConfig, evaluator, initializer) -> list[TrainRecord]:
    """Run cfg.restarts independent Adam descents of the distillation cost.

    Args:
        evaluator: maps a flat parameter vector to (p_success, fidelity, ...).
        initializer: maps (rng) to an initial parameter vector.

    Each restart tracks the best-so-far cost and parameters; Adam uses decay
    rates 0.9 / 0.999 and epsilon 1e-8 with a constant learning rate.
    """
    records = []
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        x = np.asarray(initializer(rng), dtype=float)
        t0 = time.perf_counter()

        def objective(vec):
            p, f = evaluator(vec)[:2]
            return cost_from_pf(p, f, cfg)

        try:
            record = _adam_single(cfg, evaluator, objective, x, restart)
        except FloatingPointError as err:
            record = TrainRecord(
                restart=restart,
                lambda_penalty=cfg.lambda_penalty,
                f_critical=cfg.f_critical,
                status=f"failed: {err}",
                initial_cost=float("nan"),
                best_cost=float("nan"),
                final_cost=float("nan"),
                p_success=float("nan"),
                fidelity=float("nan"),
                params=list(x),
                steps=0,
            )
        record.wall_time = time.perf_counter() - t0
        records.append(record)
    return records


def _fast_gradient(cfg, evaluator, x, h: float = 1e-4):
    """Central differences via the evaluator's batched perturbation path.

    Returns (cost at x, gradient).  Numerically equivalent to calling
    ``gradient`` on the scalar objective, but amortizes the circuit build
    across all perturbations.
    """
    p0, f0, p_plus, f_plus, p_minus, f_minus = evaluator.pf_perturbations(x, h)
    cost_plus = np.array([cost_from_pf(p, f, cfg) for p, f in zip(p_plus, f_plus)])
    cost_minus = np.array([cost_from_pf(p, f, cfg) for p, f in zip(p_minus, f_minus)])
    if not (np.all(np.isfinite(cost_plus)) and np.all(np.isfinite(cost_minus))):
        raise FloatingPointError("objective is not finite near the base point")
    return cost_from_pf(p0, f0, cfg), (cost_plus - cost_minus) / (2.0 * h)


def _adam_single(cfg, evaluator, objective, x, restart) -> TrainRecord:
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    batched = hasattr(evaluator, "pf_perturbations")
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    initial_cost = objective(x)
    best_cost, best_x = initial_cost, x.copy()
    history = [best_cost]
    for step in range(1, cfg.steps + 1):
        if batched:
            _, g = _fast_gradient(cfg, evaluator, x)
        else:
            g = gradient(objective, x)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g**2
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        x = x - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        c = objective(x)
        if not np.isfinite(c):
            raise FloatingPointError(f"cost diverged at step {step}")
        if c < best_cost:
            best_cost, best_x = c, x.copy()
        if step % cfg.log_every == 0:
            history.append(best_cost)
    p, f = evaluator(best_x)[:2]
    return TrainRecord(
        restart=restart,
        lambda_penalty=cfg.lambda_penalty,
        f_critical=cfg.f_critical,
        status="ok",
        initial_cost=initial_cost,
        best_cost=best_cost,
        final_cost=objective(x),
        p_success=p,
        fidelity=f,
        params=list(best_x),
        steps=cfg.steps,
        best_cost_history=history,
    )


# Reconstruction of the hyperparameter scatter used for frontier sweeps.
DEFAULT_LAMBDA_GRID = (1.0, 3.0, 10.0, 30.0)
DEFAULT_FC_GRID = (0.9, 0.95, 0.99, 0.995, 0.999)


def hyperparameter_grid(
    lambdas=DEFAULT_LAMBDA_GRID, f_criticals=DEFAULT_FC_GRID
) -> list[tuple[float, float]]:
    return [(lam, fc) for lam in lambdas for fc in f_criticals]


def write_records(path, records: list[TrainRecord]):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_records(path) -> list[TrainRecord]:
    """Read a record file, skipping any leading header lines."""
    records = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            payload = json.loads(line)
            if "_header" in payload:
                continue
            records.append(TrainRecord(**payload))
    return records
