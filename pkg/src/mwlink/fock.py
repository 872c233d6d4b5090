"""Truncated Fock-space states and operators.

A DensityMatrix is a dense Hermitian matrix over an ordered tensor product of
finite-dimensional subsystems; a FockOperator is a (generally non-Hermitian)
matrix over the same structure.  Truncation makes gates unitary only on the
bulk of the space, so unitarity checks exclude a guard band of levels near
the cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import factorial

TRACE_TOL = 1e-6
HERMITICITY_TOL = 1e-10
GUARD_BAND = 2


@dataclass(frozen=True)
class DensityMatrix:
    """Dense density matrix with an explicit subsystem dimension list."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)
        size = int(np.prod(dims))
        if data.shape != (size, size):
            raise ValueError(f"data shape {data.shape} does not match dims {dims}")
        if np.max(np.abs(data - data.conj().T)) > HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian")

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def check_valid(self, trace_tol: float = TRACE_TOL, psd_tol: float = 1e-8):
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace} differs from 1")
        min_eig = np.linalg.eigvalsh(self.data).min()
        if min_eig < -psd_tol:
            raise ValueError(f"negative eigenvalue {min_eig}")
        return self


@dataclass(frozen=True)
class FockOperator:
    """Dense operator over a list of subsystem dimensions."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)
        size = int(np.prod(dims))
        if data.shape != (size, size):
            raise ValueError(f"data shape {data.shape} does not match dims {dims}")


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def displacement_matrix(alpha: complex, cutoff: int, method: str = "expm") -> FockOperator:
    """Displacement operator D(alpha) truncated to ``cutoff`` levels.

    method="expm" exponentiates the truncated generator; method="laguerre"
    uses the closed-form matrix elements.  The two agree on the bulk subspace
    and serve as mutual validation.
    """
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    if method == "expm":
        a = annihilation(cutoff)
        data = expm(alpha * a.conj().T - np.conj(alpha) * a)
    elif method == "laguerre":
        data = _displacement_laguerre(alpha, cutoff)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FockOperator((cutoff,), data)


def _displacement_laguerre(alpha: complex, cutoff: int) -> np.ndarray:
    """<m|D(alpha)|n> = sqrt(n!/m!) alpha^(m-n) e^(-|a|^2/2) L_n^(m-n)(|a|^2), m >= n."""
    x = abs(alpha) ** 2
    d = np.zeros((cutoff, cutoff), dtype=complex)
    for m in range(cutoff):
        for n in range(cutoff):
            p, q = max(m, n), min(m, n)  # p >= q
            k = p - q
            lag = _assoc_laguerre(q, k, x)
            mag = np.sqrt(factorial(q) / factorial(p)) * np.exp(-x / 2.0) * lag
            if m >= n:
                d[m, n] = mag * alpha**k
            else:
                d[m, n] = mag * (-np.conj(alpha)) ** k
    return d


def _assoc_laguerre(n: int, k: int, x: float) -> float:
    # stable upward recurrence in n
    if n == 0:
        return 1.0
    lm1, l = 1.0, 1.0 + k - x
    for i in range(1, n):
        lm1, l = l, ((2 * i + 1 + k - x) * l - (i + k) * lm1) / (i + 1)
    return l


def check_bulk_unitary(op: FockOperator, guard: int = GUARD_BAND, tol: float = 1e-8) -> float:
    """Max deviation of U^dag U from identity on columns supported below
    cutoff - guard in every bosonic subsystem; raises above ``tol``."""
    gram = op.data.conj().T @ op.data
    idx = _bulk_indices(op.dims, guard)
    dev = np.max(np.abs(gram[np.ix_(idx, idx)] - np.eye(len(idx))))
    if dev > tol:
        raise ValueError(f"operator deviates from unitarity on the bulk by {dev}")
    return float(dev)


def _bulk_indices(dims: tuple[int, ...], guard: int) -> list[int]:
    grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
    flat = [g.ravel() for g in grids]
    keep = np.ones(int(np.prod(dims)), dtype=bool)
    for g, d in zip(flat, dims):
        if d > 2:  # qubits carry no truncation error
            keep &= g < d - guard
    return list(np.nonzero(keep)[0])


def thermal_state(n_bar: float, cutoff: int, weight_tol: float = 1e-10) -> DensityMatrix:
    """Thermal state with mean photon number n_bar, truncated at ``cutoff``
    or once the cumulative weight exceeds 1 - weight_tol."""
    if n_bar < 0.0:
        raise ValueError("n_bar must be >= 0")
    n = np.arange(cutoff)
    if n_bar == 0.0:
        probs = np.zeros(cutoff)
        probs[0] = 1.0
    else:
        probs = (n_bar / (n_bar + 1.0)) ** n / (n_bar + 1.0)
        cum = np.cumsum(probs)
        probs[np.concatenate(([False], cum[:-1] > 1.0 - weight_tol))] = 0.0
    return DensityMatrix((cutoff,), np.diag(probs).astype(complex))


def two_mode_squeezer(r: float, cutoff: int) -> FockOperator:
    """Truncated exp(r (a1^dag a2^dag - a1 a2))."""
    a = annihilation(cutoff)
    pair = np.kron(a.conj().T, a.conj().T)
    return FockOperator((cutoff, cutoff), expm(r * (pair - pair.conj().T)))


def gaussian_to_fock(state, cutoff: int) -> DensityMatrix:
    """Fock representation of a symmetric standard-form two-mode Gaussian state.

    Decomposes the state as a two-mode squeezer acting on a pair of equal
    thermal states: n_bar = (sqrt(a^2 - c^2) - 1)/2 and tanh(2r) = c/a.
    """
    from .gaussian import standard_form

    a, b, c = standard_form(state)
    if abs(a - b) > 1e-9:
        raise ValueError("gaussian_to_fock requires a symmetric state")
    det = a**2 - c**2
    if det < 1.0 - 1e-9:
        raise ValueError("unphysical covariance: a^2 - c^2 < 1")
    n_bar = (np.sqrt(max(det, 1.0)) - 1.0) / 2.0
    r = 0.5 * np.arctanh(c / a)
    th = thermal_state(n_bar, cutoff).data
    sq = two_mode_squeezer(r, cutoff).data
    rho = sq @ np.kron(th, th) @ sq.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix((cutoff, cutoff), rho)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(a.dims + b.dims, np.kron(a.data, b.data))


def partial_trace(rho: DensityMatrix, keep: list[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep`` (order preserved)."""
    n = len(rho.dims)
    keep = list(keep)
    if not all(0 <= k < n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid keep list {keep} for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = rho.data.reshape(rho.dims + rho.dims)
    for offset, i in enumerate(sorted(traced)):
        ax = i - offset
        ndim_half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + ndim_half)
    new_dims = tuple(rho.dims[i] for i in sorted(keep))
    t = t.reshape(int(np.prod(new_dims)), int(np.prod(new_dims)))
    if sorted(keep) != keep:
        perm = [sorted(keep).index(k) for k in keep]
        return reorder(DensityMatrix(new_dims, t), perm)
    return DensityMatrix(new_dims, t)


def reorder(rho: DensityMatrix, perm: list[int]) -> DensityMatrix:
    """Permute subsystem labels: new subsystem i is old subsystem perm[i]."""
    n = len(rho.dims)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"invalid permutation {perm}")
    t = rho.data.reshape(rho.dims + rho.dims)
    axes = list(perm) + [p + n for p in perm]
    t = t.transpose(axes)
    new_dims = tuple(rho.dims[p] for p in perm)
    size = int(np.prod(new_dims))
    return DensityMatrix(new_dims, t.reshape(size, size))


def number_projector(n_th: int, cutoff: int) -> FockOperator:
    """Projector onto joint photon number < n_th on both microwave modes."""
    if not 1 <= n_th <= cutoff:
        raise ValueError(f"n_th must be in [1, {cutoff}], got {n_th}")
    single = np.zeros(cutoff)
    single[:n_th] = 1.0
    return FockOperator((cutoff, cutoff), np.diag(np.kron(single, single)).astype(complex))


def quadrature_moments(rho: DensityMatrix) -> np.ndarray:
    """First-moment-free covariance of (q1, p1, q2, p2) computed in Fock space.

    Matches the Gaussian covariance convention (vacuum = I/2) for states
    built by gaussian_to_fock, up to truncation error.
    """
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise ValueError("quadrature_moments expects a two-mode bosonic state")
    d = rho.dims[0]
    a = annihilation(d)
    q = (a + a.conj().T) / np.sqrt(2.0)
    p = (a - a.conj().T) / (1j * np.sqrt(2.0))
    eye = np.eye(d)
    ops = [np.kron(q, eye), np.kron(p, eye), np.kron(eye, q), np.kron(eye, p)]
    means = np.array([np.trace(rho.data @ o).real for o in ops])
    cov = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
            cov[i, j] = np.trace(rho.data @ sym).real - means[i] * means[j]
    return cov
