"""Entanglement quantifiers: entropies, RCI, Gaussian and two-qubit EoF.

All entanglement values are in ebits (log base 2).  Symplectic eigenvalues
follow the convention where a pure mode has nu = 1 (i.e. they are quoted in
units where the vacuum covariance diagonal is 1, twice the I/2 convention
used for covariance matrices).
"""

from __future__ import annotations

import numpy as np

from .gaussian import TwoModeGaussian, standard_form

EIG_FLOOR = 1e-10


def g_func(x):
    """Entropy of a thermal mode with symplectic eigenvalue x >= 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - 1e-9):
        raise ValueError("g_func requires x >= 1")
    x = np.maximum(x, 1.0)
    up = (x + 1.0) / 2.0
    dn = (x - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = up * np.log2(up) - np.where(dn > 0.0, dn * np.log2(dn), 0.0)
    return float(out) if out.ndim == 0 else out


def h_func(x):
    """Closed-form EoF kernel for symmetric two-mode Gaussian states."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("h_func requires x > 0")
    up = (1.0 + x) ** 2 / (4.0 * x)
    dn = (1.0 - x) ** 2 / (4.0 * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = up * np.log2(up) - np.where(dn > 0.0, dn * np.log2(dn), 0.0)
    return float(out) if out.ndim == 0 else out


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)


def symplectic_eigenvalues(state: TwoModeGaussian) -> tuple[float, float]:
    """Symplectic eigenvalues (nu+, nu-) of a standard-form two-mode state.

    Pure states have nu+ = nu- = 1.
    """
    a, b, c = standard_form(state)
    y = (a + b) ** 2 - 4.0 * c**2
    if y < 0.0:
        raise ValueError("unphysical standard-form covariance")
    root = np.sqrt(y)
    return (root + (b - a)) / 2.0, (root - (b - a)) / 2.0


def symplectic_eigenvalues_general(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of an arbitrary covariance matrix (vacuum -> 1).

    Computed as the moduli of the eigenvalues of i * Omega * (2 V).
    """
    from .gaussian import symplectic_form

    n = cov.shape[0] // 2
    omega = symplectic_form(n)
    eig = np.linalg.eigvals(1j * omega @ (2.0 * cov))
    nus = np.sort(np.abs(eig))
    return nus[::2][:n] if nus.size == 2 * n else nus


def gaussian_rci(state: TwoModeGaussian) -> float:
    """Reverse coherent information of a symmetric two-mode Gaussian state."""
    a, b, _ = standard_form(state)
    if abs(a - b) > 1e-9:
        raise ValueError("gaussian_rci requires a symmetric state (a = b)")
    nu_p, nu_m = symplectic_eigenvalues(state)
    return g_func(a) - g_func(nu_p) - g_func(nu_m)


def gaussian_eof_symmetric(state: TwoModeGaussian) -> float:
    """EoF of a symmetric two-mode Gaussian state (closed form).

    Uses the two smallest ordinary eigenvalues nu1, nu2 of the covariance
    in vacuum-unit normalization; returns h(sqrt(nu1 nu2)) when nu1 nu2 < 1.
    """
    a, b, _ = standard_form(state)
    if abs(a - b) > 1e-9:
        raise ValueError("gaussian_eof_symmetric requires a symmetric state")
    eig = np.sort(np.linalg.eigvalsh(2.0 * state.cov))
    prod = eig[0] * eig[1]
    if prod >= 1.0:
        return 0.0
    return h_func(np.sqrt(prod))


_SY_SY = np.kron(
    np.array([[0.0, -1.0j], [1.0j, 0.0]]), np.array([[0.0, -1.0j], [1.0j, 0.0]])
)

# Bell state (|00> + |11>)/sqrt(2), the distillation target
BELL_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def _check_density_matrix(rho: np.ndarray, tol: float = 1e-8):
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise ValueError("density matrix is not positive semidefinite")


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence requires a 4x4 density matrix")
    _check_density_matrix(rho)
    rho_tilde = _SY_SY @ rho.conj() @ _SY_SY
    eig = np.linalg.eigvals(rho @ rho_tilde)
    # abs() guards tiny negative/complex residue before the square root
    v = np.sort(np.sqrt(np.abs(eig.real)))[::-1]
    return max(0.0, v[0] - v[1] - v[2] - v[3])


def qubit_eof(rho: np.ndarray) -> float:
    """EoF of an arbitrary two-qubit state via the concurrence closed form."""
    delta = concurrence(rho)
    return binary_entropy((1.0 + np.sqrt(1.0 - delta**2)) / 2.0)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits; eigenvalues within numerical slack of 0 are clamped."""
    eig = np.linalg.eigvalsh(rho)
    if eig.min() < -EIG_FLOOR:
        raise ValueError(f"density matrix has eigenvalue {eig.min()} < -{EIG_FLOOR}")
    eig = np.clip(eig, 0.0, None)
    nz = eig[eig > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def rci_general(rho: np.ndarray, dims: tuple[int, int]) -> float:
    """Reverse coherent information max{S(A), S(B)} - S(AB) for a bipartite state."""
    da, db = dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (da * db, da * db):
        raise ValueError("density matrix shape does not match the bipartition")
    r = rho.reshape(da, db, da, db)
    rho_a = np.einsum("ijkj->ik", r)
    rho_b = np.einsum("ijik->jk", r)
    s_ab = von_neumann_entropy(rho)
    return max(von_neumann_entropy(rho_a), von_neumann_entropy(rho_b)) - s_ab


def bell_fidelity(rho: np.ndarray) -> float:
    """Overlap of a two-qubit state with the Bell pair (|00> + |11>)/sqrt(2)."""
    val = BELL_PLUS.conj() @ np.asarray(rho, dtype=complex) @ BELL_PLUS
    assert abs(val.imag) < 1e-10
    return float(val.real)
