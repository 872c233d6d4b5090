"""Hybrid CV-DV distillation: ECD-based variational circuits and direct swap.

Subsystem ordering for the composite state is (m1, q1, m2, q2); each local
circuit acts on a (mode, qubit) pair with the mode as the first factor.
Both sides apply the same circuit parameters (a per-side flag exists for
experimentation but defaults to the symmetric protocol).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .fock import (
    DensityMatrix,
    FockOperator,
    annihilation,
    displacement_matrix,
    number_projector,
    partial_trace,
    reorder,
    tensor,
)
from .measures import BELL_PLUS, bell_fidelity

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class HybridCircuitParams:
    """Parameters of a D-block ECD circuit plus the final displacement/rotation.

    Each block holds (theta, phi, beta); the flat-vector layout is
    [theta_k, phi_k, Re beta_k, Im beta_k] per block followed by
    [final_theta, final_phi, Re final_beta, Im final_beta].
    """

    blocks: tuple[tuple[float, float, complex], ...]
    final_beta: complex = 0.0
    final_theta: float = 0.0
    final_phi: float = 0.0

    def __post_init__(self):
        if len(self.blocks) < 1:
            raise ValueError("at least one ECD block is required")
        blocks = tuple((float(t), float(p), complex(b)) for t, p, b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        vec = self.to_vector()
        if not np.all(np.isfinite(vec)):
            raise ValueError("circuit parameters must be finite")

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def to_vector(self) -> np.ndarray:
        out = []
        for theta, phi, beta in self.blocks:
            out.extend([theta, phi, beta.real, beta.imag])
        out.extend(
            [self.final_theta, self.final_phi, self.final_beta.real, self.final_beta.imag]
        )
        return np.array(out, dtype=float)

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "HybridCircuitParams":
        vec = np.asarray(vec, dtype=float)
        if vec.size < 8 or vec.size % 4 != 0:
            raise ValueError(f"vector length {vec.size} is not 4D + 4 with D >= 1")
        body, tail = vec[:-4], vec[-4:]
        blocks = tuple(
            (body[i], body[i + 1], complex(body[i + 2], body[i + 3]))
            for i in range(0, body.size, 4)
        )
        return cls(
            blocks=blocks,
            final_theta=tail[0],
            final_phi=tail[1],
            final_beta=complex(tail[2], tail[3]),
        )


@dataclass(frozen=True)
class ProtocolResult:
    """Outcome of one distillation protocol evaluation."""

    p_success: float
    rho_qq: np.ndarray
    fidelity: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rho_qq", np.asarray(self.rho_qq, dtype=complex))
        if not 0.0 <= self.p_success <= 1.0 + 1e-10:
            raise ValueError(f"p_success out of range: {self.p_success}")
        if abs(self.fidelity - bell_fidelity(self.rho_qq)) > 1e-10:
            raise ValueError("stored fidelity disagrees with the stored state")


def qubit_rotation(theta: float, phi: float) -> np.ndarray:
    """exp[-i (theta/2) (sx cos(phi) + sy sin(phi))]."""
    axis = SIGMA_X * np.cos(phi) + SIGMA_Y * np.sin(phi)
    return np.cos(theta / 2.0) * np.eye(2) - 1j * np.sin(theta / 2.0) * axis


def ecd_gate(beta: complex, cutoff: int) -> FockOperator:
    """Echoed conditional displacement on (mode, qubit): D(+-beta/2) with a flip."""
    d_plus = displacement_matrix(beta / 2.0, cutoff).data
    d_minus = displacement_matrix(-beta / 2.0, cutoff).data
    data = np.kron(d_plus, np.outer(KET1, KET0)) + np.kron(d_minus, np.outer(KET0, KET1))
    return FockOperator((cutoff, 2), data)


def build_lvqc(params: HybridCircuitParams, cutoff: int) -> FockOperator:
    """Full circuit unitary on (mode, qubit).

    Within each block the rotation acts before the ECD gate; the final layer
    applies the last rotation and then a plain displacement D(final_beta).
    """
    eye_m = np.eye(cutoff)
    u = np.eye(2 * cutoff, dtype=complex)
    for theta, phi, beta in params.blocks:
        u = np.kron(eye_m, qubit_rotation(theta, phi)) @ u
        u = ecd_gate(beta, cutoff).data @ u
    u = np.kron(eye_m, qubit_rotation(params.final_theta, params.final_phi)) @ u
    u = np.kron(displacement_matrix(params.final_beta, cutoff).data, np.eye(2)) @ u
    return FockOperator((cutoff, 2), u)


def _assemble_qmqm(rho_mm: DensityMatrix) -> DensityMatrix:
    """|0>_q1 x rho_mm x |0>_q2 in the (m1, q1, m2, q2) ordering."""
    q0 = DensityMatrix((2,), np.outer(KET0, KET0))
    full = tensor(tensor(rho_mm, q0), q0)  # (m1, m2, q1, q2)
    return reorder(full, [0, 2, 1, 3])


def run_protocol(
    rho_mm: DensityMatrix,
    params: HybridCircuitParams,
    n_th: int,
    params_right: HybridCircuitParams | None = None,
) -> ProtocolResult:
    """Apply the hybrid LVQC on both sides, post-select on low photon counts.

    ``params_right`` enables independent per-side circuits; the default is
    the symmetric protocol with identical parameters.
    """
    cutoff = rho_mm.dims[0]
    if rho_mm.dims != (cutoff, cutoff):
        raise ValueError("rho_mm must cover two equal-dimension microwave modes")
    u_left = build_lvqc(params, cutoff).data
    u_right = u_left if params_right is None else build_lvqc(params_right, cutoff).data
    u_full = np.kron(u_left, u_right)
    rho_full = _assemble_qmqm(rho_mm)
    sigma = u_full @ rho_full.data @ u_full.conj().T

    proj_single = np.zeros(cutoff)
    proj_single[:n_th] = 1.0
    proj_mq = np.kron(proj_single, np.ones(2))
    proj_diag = np.kron(proj_mq, proj_mq)
    p_success = float(np.real(np.sum(proj_diag * np.diag(sigma).real)))
    if p_success < 1e-12:
        raise ValueError("degenerate post-selection: success probability ~ 0")
    numerator = proj_diag[:, None] * sigma * proj_diag[None, :]
    kept = DensityMatrix((cutoff, 2, cutoff, 2), numerator)
    rho_qq = partial_trace(kept, keep=[1, 3]).data / p_success
    return ProtocolResult(
        p_success=min(p_success, 1.0),
        rho_qq=rho_qq,
        fidelity=bell_fidelity(rho_qq),
        provenance={"protocol": "hybrid-lvqc", "n_th": n_th, "cutoff": cutoff},
    )


def swap_hamiltonian(cutoff: int) -> np.ndarray:
    """m x |1><0| + h.c. on (mode, qubit)."""
    a = annihilation(cutoff)
    h = np.kron(a, np.outer(KET1, KET0))
    return h + h.conj().T


def direct_swap_qubit_state(rho_mm: DensityMatrix, t: float) -> np.ndarray:
    """Two-qubit state after evolving both sides for time t and discarding modes."""
    cutoff = rho_mm.dims[0]
    u = expm(-1j * t * swap_hamiltonian(cutoff))
    u_full = np.kron(u, u)
    rho_full = _assemble_qmqm(rho_mm)
    sigma = u_full @ rho_full.data @ u_full.conj().T
    return partial_trace(DensityMatrix((cutoff, 2, cutoff, 2), sigma), keep=[1, 3]).data


def _euler_unitary(angles: np.ndarray) -> np.ndarray:
    a, b, c = angles
    rz = lambda x: np.diag([np.exp(-0.5j * x), np.exp(0.5j * x)])
    ry = np.array(
        [[np.cos(b / 2.0), -np.sin(b / 2.0)], [np.sin(b / 2.0), np.cos(b / 2.0)]],
        dtype=complex,
    )
    return rz(a) @ ry @ rz(c)


def maximize_bell_fidelity(rho_qq: np.ndarray) -> tuple[np.ndarray, float]:
    """Maximize Bell fidelity over a single-qubit unitary on the first qubit.

    Simplex search over three Euler angles from a spread of starting points;
    returns the corrected state and its fidelity.
    """

    def neg_fid(angles):
        u = np.kron(_euler_unitary(angles), np.eye(2))
        return -bell_fidelity(u @ rho_qq @ u.conj().T)

    starts = [np.zeros(3)]
    for k in range(7):
        starts.append(np.array([k, 2 * k, 3 * k]) * np.pi / 4.0 + 0.1)
    best = None
    for x0 in starts:
        res = minimize(
            neg_fid, x0, method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-10}
        )
        if best is None or res.fun < best.fun:
            best = res
    u = np.kron(_euler_unitary(best.x), np.eye(2))
    rho_opt = u @ rho_qq @ u.conj().T
    return rho_opt, bell_fidelity(rho_opt)


def direct_swap(rho_mm: DensityMatrix, t: float = np.pi / 2.0) -> ProtocolResult:
    """Deterministic CV-to-DV conversion via the swap Hamiltonian.

    Evolves for time t (maximum entanglement at odd multiples of pi/2), then
    maximizes Bell fidelity with a local single-qubit unitary.
    """
    rho_qq = direct_swap_qubit_state(rho_mm, t)
    rho_opt, fid = maximize_bell_fidelity(rho_qq)
    return ProtocolResult(
        p_success=1.0,
        rho_qq=rho_opt,
        fidelity=fid,
        provenance={"protocol": "direct-swap", "t": t},
    )


class HybridEvaluator:
    """Fast (success probability, fidelity, state) evaluation for training.

    Precomputes the rank decomposition of rho_mm and the spectral machinery
    for displacement operators, so one call costs a handful of small dense
    matrix products.  Stateless after construction; safe to share read-only
    across workers.
    """

    def __init__(self, rho_mm: DensityMatrix, n_th: int, rank_tol: float = 1e-12):
        cutoff = rho_mm.dims[0]
        if rho_mm.dims != (cutoff, cutoff):
            raise ValueError("rho_mm must cover two equal-dimension microwave modes")
        self.cutoff = cutoff
        self.n_th = n_th
        evals, evecs = np.linalg.eigh(rho_mm.data)
        keep = evals > rank_tol * evals.max()
        self.weights = evals[keep]
        self.vectors = evecs[:, keep].T.reshape(-1, cutoff, cutoff)
        # qubits in |0>: embed the rank vectors into the (m1 q1, m2 q2) grid once
        self._w0 = np.zeros((self.weights.size, 2 * cutoff, 2 * cutoff), dtype=complex)
        self._w0[:, ::2, ::2] = self.vectors
        # spectral decomposition of a^dag - a for cheap displacement exponentials
        a = annihilation(cutoff)
        k_herm = 1j * (a.conj().T - a)
        self._mu, self._q = np.linalg.eigh(k_herm)
        self._qh = self._q.conj().T
        self._n = np.arange(cutoff)
        mask = (self._n < n_th).astype(float)
        self._mask_mq = np.kron(mask, np.ones(2))

    def displacement(self, alpha: complex) -> np.ndarray:
        mag, phase = abs(alpha), np.angle(alpha)
        core = (self._q * np.exp(-1j * mag * self._mu)) @ self._qh
        rot = np.exp(1j * phase * self._n)
        return (rot[:, None] * core) * rot.conj()[None, :]

    def circuit_unitary(self, params: HybridCircuitParams) -> np.ndarray:
        """Same unitary as build_lvqc, assembled without explicit kron products."""
        c = self.cutoff
        u = np.eye(2 * c, dtype=complex).reshape(c, 2, 2 * c)
        for theta, phi, beta in params.blocks:
            u = np.matmul(qubit_rotation(theta, phi), u)  # I_mode x R
            d = self.displacement(beta / 2.0)
            flipped = np.empty_like(u)
            flipped[:, 1, :] = d @ u[:, 0, :]
            flipped[:, 0, :] = d.conj().T @ u[:, 1, :]
            u = flipped
        u = np.matmul(qubit_rotation(params.final_theta, params.final_phi), u)
        d = self.displacement(params.final_beta)
        u = (d @ u.reshape(c, 2 * 2 * c)).reshape(c, 2, 2 * c)
        return u.reshape(2 * c, 2 * c)

    def evaluate(self, vec: np.ndarray) -> tuple[float, float, np.ndarray]:
        """Return (p_success, fidelity, rho_qq) for a flat parameter vector."""
        params = HybridCircuitParams.from_vector(vec)
        u = self.circuit_unitary(params)
        c = self.cutoff
        w = np.matmul(np.matmul(u, self._w0), u.T)
        wp = w * (self._mask_mq[:, None] * self._mask_mq[None, :])
        wp *= np.sqrt(self.weights)[:, None, None]
        # stack (qubit1, qubit2) x (rank, mode1, mode2); then rho_qq = M M^dag
        m = wp.reshape(-1, c, 2, c, 2).transpose(2, 4, 0, 1, 3).reshape(4, -1)
        p_success = float(np.vdot(m, m).real)
        rho_qq = m @ m.conj().T
        return self._finish(p_success, rho_qq)

    __call__ = evaluate

    def _finish(self, p_success, rho_qq):
        if p_success < 1e-12:
            raise ValueError("degenerate post-selection: success probability ~ 0")
        rho_qq /= p_success
        fid = float((BELL_PLUS.conj() @ rho_qq @ BELL_PLUS).real)
        return min(p_success, 1.0), fid, rho_qq

    def _rotation_layer(self, theta: float, phi: float) -> np.ndarray:
        """I_mode x R(theta, phi) without an explicit kron."""
        c = self.cutoff
        r = qubit_rotation(theta, phi)
        k = np.zeros((2 * c, 2 * c), dtype=complex)
        diag = np.arange(c)
        for i in range(2):
            for j in range(2):
                k[2 * diag + i, 2 * diag + j] = r[i, j]
        return k

    def _block_matrix(self, theta: float, phi: float, beta: complex) -> np.ndarray:
        """One ECD block: ECD(beta) after the qubit rotation."""
        k = self._rotation_layer(theta, phi)
        d = self.displacement(beta / 2.0)
        out = np.empty_like(k)
        out[1::2, :] = d @ k[0::2, :]
        out[0::2, :] = d.conj().T @ k[1::2, :]
        return out

    def _final_matrix(self, theta: float, phi: float, beta: complex) -> np.ndarray:
        """Final layer: rotation then plain displacement on the mode."""
        k = self._rotation_layer(theta, phi)
        d = self.displacement(beta)
        out = np.empty_like(k)
        out[0::2, :] = d @ k[0::2, :]
        out[1::2, :] = d @ k[1::2, :]
        return out

    def _blocks_from_vector(self, vec: np.ndarray) -> list[np.ndarray]:
        blocks = [
            self._block_matrix(vec[i], vec[i + 1], complex(vec[i + 2], vec[i + 3]))
            for i in range(0, vec.size - 4, 4)
        ]
        t = vec[-4:]
        blocks.append(self._final_matrix(t[0], t[1], complex(t[2], t[3])))
        return blocks

    def _pf_batch(self, unitaries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(p_success, fidelity) for a stack of circuit unitaries."""
        c = self.cutoff
        w = np.matmul(unitaries[:, None, :, :], self._w0[None, :, :, :])
        w = np.matmul(w, np.swapaxes(unitaries, 1, 2)[:, None, :, :])
        w *= self._mask_mq[:, None] * self._mask_mq[None, :]
        w *= np.sqrt(self.weights)[None, :, None, None]
        p = np.sum(np.abs(w) ** 2, axis=(1, 2, 3))
        wq = w.reshape(w.shape[0], -1, c, 2, c, 2)
        amp = (wq[:, :, :, 0, :, 0] + wq[:, :, :, 1, :, 1]) / np.sqrt(2.0)
        f_num = np.sum(np.abs(amp) ** 2, axis=(1, 2, 3))
        return p, f_num / np.maximum(p, 1e-300)

    def pf_perturbations(self, vec: np.ndarray, h: float = 1e-4):
        """(p, F) at vec and at all central-difference perturbations vec +- h e_i.

        Uses cached prefix/suffix circuit products so that each perturbed
        unitary costs two small matrix products; the values are identical to
        independent evaluation up to floating-point associativity.

        Returns (p0, f0, p_plus, f_plus, p_minus, f_minus).
        """
        vec = np.asarray(vec, dtype=float)
        blocks = self._blocks_from_vector(vec)
        n_blocks = len(blocks)
        dim = 2 * self.cutoff
        prefix = [None] * n_blocks  # prefix[k] = B_k ... B_0
        suffix = [None] * n_blocks  # suffix[k] = B_last ... B_k
        acc = np.eye(dim, dtype=complex)
        for k in range(n_blocks):
            acc = blocks[k] @ acc
            prefix[k] = acc
        acc = np.eye(dim, dtype=complex)
        for k in reversed(range(n_blocks)):
            acc = acc @ blocks[k]
            suffix[k] = acc
        stack = [prefix[-1]]
        for i in range(vec.size):
            k = min(i // 4, n_blocks - 1)
            base = vec[4 * k : 4 * k + 4].copy()
            builder = self._final_matrix if k == n_blocks - 1 else self._block_matrix
            for sign in (h, -h):
                pert = base.copy()
                pert[i - 4 * k] += sign
                blk = builder(pert[0], pert[1], complex(pert[2], pert[3]))
                left = suffix[k + 1] if k + 1 < n_blocks else np.eye(dim)
                right = prefix[k - 1] if k > 0 else np.eye(dim)
                stack.append(left @ blk @ right)
        p, f = self._pf_batch(np.array(stack))
        p_pert = p[1:].reshape(-1, 2)
        f_pert = f[1:].reshape(-1, 2)
        return p[0], f[0], p_pert[:, 0], f_pert[:, 0], p_pert[:, 1], f_pert[:, 1]
