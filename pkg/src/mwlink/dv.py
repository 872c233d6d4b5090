"""Two-copy DV post-processing: DEJMPS and the DV variational circuit.

Qubit ordering for the four-qubit register is (A0, B0, A1, B1): copy one is
(A0, B0), copy two is (A1, B1).  Alice holds A0, A1 and Bob holds B0, B1;
the ancilla copy (A1, B1) is measured in the computational basis and the
protocol succeeds on agreeing outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hybrid import qubit_rotation
from .measures import bell_fidelity


def _embed(op: np.ndarray, target: int, n_qubits: int = 4) -> np.ndarray:
    full = np.array([[1.0]], dtype=complex)
    for i in range(n_qubits):
        full = np.kron(full, op if i == target else np.eye(2))
    return full


def _cnot(control: int, target: int, n_qubits: int = 4) -> np.ndarray:
    dim = 2**n_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        bits = [(i >> (n_qubits - 1 - k)) & 1 for k in range(n_qubits)]
        if bits[control]:
            bits[target] ^= 1
        j = sum(b << (n_qubits - 1 - k) for k, b in enumerate(bits))
        u[j, i] = 1.0
    return u

CNOT_A0_A1 = _cnot(0, 2)
CNOT_B0_B1 = _cnot(1, 3)


def _measure_ancillas(rho4: np.ndarray) -> tuple[np.ndarray, float]:
    """Z-measure (A1, B1), keep agreeing outcomes, return kept (A0, B0) state."""
    t = rho4.reshape(2, 2, 2, 2, 2, 2, 2, 2)  # (A0 B0 A1 B1) x (A0' B0' A1' B1')
    kept = np.zeros((2, 2, 2, 2), dtype=complex)
    p_success = 0.0
    for outcome in (0, 1):
        branch = t[:, :, outcome, outcome, :, :, outcome, outcome]
        kept += branch
        p_success += float(np.trace(branch.reshape(4, 4)).real)
    if p_success <= 0.0:
        return np.zeros((4, 4), dtype=complex), 0.0
    return kept.reshape(4, 4) / p_success, p_success


def _two_copy_state(rho_a: np.ndarray, rho_b: np.ndarray) -> np.ndarray:
    """(A0 B0) x (A1 B1) product, which is already the register ordering."""
    return np.kron(rho_a, rho_b)


def dejmps(rho_a: np.ndarray, rho_b: np.ndarray) -> tuple[np.ndarray, float]:
    """One round of the DEJMPS purification protocol.

    Alice rotates with Rx(pi/2) and Bob with Rx(-pi/2) on both copies, local
    CNOTs map copy one onto copy two, and the ancilla copy is measured.
    Returns the normalized kept state and the success probability.
    """
    rho = _two_copy_state(rho_a, rho_b)
    u = (
        CNOT_B0_B1
        @ CNOT_A0_A1
        @ _embed(qubit_rotation(np.pi / 2.0, 0.0), 0)
        @ _embed(qubit_rotation(-np.pi / 2.0, 0.0), 1)
        @ _embed(qubit_rotation(np.pi / 2.0, 0.0), 2)
        @ _embed(qubit_rotation(-np.pi / 2.0, 0.0), 3)
    )
    return _measure_ancillas(u @ rho @ u.conj().T)


@dataclass(frozen=True)
class DVCircuitParams:
    """Rotation angles of an L-layer DV circuit.

    Each layer holds (theta, phi) for the four qubits (A0, B0, A1, B1) in
    order; the flat vector is the row-major concatenation, length 8L.
    """

    layers: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValueError("at least one layer is required")
        layers = tuple(
            tuple((float(t), float(p)) for t, p in layer) for layer in self.layers
        )
        for layer in layers:
            if len(layer) != 4:
                raise ValueError("each layer needs angles for exactly four qubits")
        object.__setattr__(self, "layers", layers)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def to_vector(self) -> np.ndarray:
        return np.array(
            [x for layer in self.layers for pair in layer for x in pair], dtype=float
        )

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "DVCircuitParams":
        vec = np.asarray(vec, dtype=float)
        if vec.size % 8 != 0 or vec.size == 0:
            raise ValueError(f"vector length {vec.size} is not 8L with L >= 1")
        arr = vec.reshape(-1, 4, 2)
        return cls(tuple(tuple(map(tuple, layer)) for layer in arr))

    @classmethod
    def dejmps_equivalent(cls) -> "DVCircuitParams":
        """Single-layer angle assignment that reproduces DEJMPS exactly."""
        return cls(
            (
                (
                    (np.pi / 2.0, 0.0),
                    (-np.pi / 2.0, 0.0),
                    (np.pi / 2.0, 0.0),
                    (-np.pi / 2.0, 0.0),
                ),
            )
        )


def dv_circuit_unitary(params: DVCircuitParams) -> np.ndarray:
    u = np.eye(16, dtype=complex)
    for layer in params.layers:
        for qubit, (theta, phi) in enumerate(layer):
            u = _embed(qubit_rotation(theta, phi), qubit) @ u
        u = CNOT_B0_B1 @ CNOT_A0_A1 @ u
    return u


def dv_lvqc(
    rho_a: np.ndarray, rho_b: np.ndarray, params: DVCircuitParams
) -> tuple[np.ndarray, float]:
    """Variational DV distillation circuit; DEJMPS is a point in this family."""
    rho = _two_copy_state(rho_a, rho_b)
    u = dv_circuit_unitary(params)
    return _measure_ancillas(u @ rho @ u.conj().T)


def two_copy_pipeline(one_copy_p_success: float, rho_one_copy: np.ndarray, dv_stage):
    """Combine two one-copy successes with a DV stage.

    ``dv_stage`` maps (rho_a, rho_b) to (rho_out, p_dv).  Returns the output
    state, the overall success probability (two independent one-copy
    heralds times the DV herald) and the output fidelity.
    """
    rho_out, p_dv = dv_stage(rho_one_copy, rho_one_copy)
    p_overall = one_copy_p_success**2 * p_dv
    return rho_out, p_overall, bell_fidelity(rho_out)
