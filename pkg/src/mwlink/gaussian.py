"""Gaussian-state machinery for the microwave interconnect.

Covariance conventions: quadrature ordering (q1, p1, q2, p2, ...), vacuum
covariance = I/2.  Two-mode states carry an explicit mean vector even though
most of the pipeline works with zero-mean states after displacement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

I2 = np.eye(2)
Z2 = np.diag([1.0, -1.0])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form Omega for n modes in (q, p) ordering."""
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega1)


@dataclass(frozen=True)
class TransducerParams:
    """Physical knobs of one electro-optic transduction cavity.

    Attributes:
        cooperativity: interaction strength, 0 <= C < 1.
        zeta_o: optical extraction efficiency in [0, 1].
        zeta_m: microwave extraction efficiency in [0, 1].
        n_in: microwave thermal occupation, >= 0.
        eta: optical link transmissivity in [0, 1]; folded into zeta_o
            when evaluating the output covariance (exact equivalence).
    """

    cooperativity: float
    zeta_o: float = 1.0
    zeta_m: float = 1.0
    n_in: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.cooperativity < 1.0:
            raise ValueError(f"cooperativity must be in [0, 1), got {self.cooperativity}")
        for name in ("zeta_o", "zeta_m", "eta"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if self.n_in < 0.0:
            raise ValueError(f"n_in must be >= 0, got {self.n_in}")


@dataclass(frozen=True)
class UVWTriple:
    """Covariance entries of the microwave-optical two-mode state."""

    u: float
    v: float
    w: float

    def __post_init__(self):
        if self.u < 1.0 - PHYSICALITY_TOL or self.w < 1.0 - PHYSICALITY_TOL:
            raise ValueError(f"u and w must be >= 1, got u={self.u}, w={self.w}")
        if self.v < 0.0:
            raise ValueError(f"v must be >= 0, got {self.v}")
        if self.u * self.w - self.v**2 < 1.0 - PHYSICALITY_TOL:
            raise ValueError(
                f"unphysical triple: u*w - v^2 = {self.u * self.w - self.v**2} < 1"
            )


@dataclass(frozen=True)
class TwoModeGaussian:
    """Mean vector and 4x4 covariance of a two-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if mean.shape != (4,) or cov.shape != (4, 4):
            raise ValueError("mean must be a 4-vector and cov a 4x4 matrix")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric")
        if not is_physical_cov(cov):
            raise ValueError("covariance matrix violates the uncertainty principle")


def is_physical_cov(cov: np.ndarray, tol: float = PHYSICALITY_TOL) -> bool:
    """Check cov + (i/2) Omega >= 0 via its (real) eigenvalue spectrum."""
    n_modes = cov.shape[0] // 2
    omega = symplectic_form(n_modes)
    eigvals = np.linalg.eigvalsh(cov + 0.5j * omega)
    return bool(eigvals.min() >= -tol)


def transducer_covariance(p: TransducerParams) -> UVWTriple:
    """Output covariance (u, v, w) of one transduction cavity.

    Any optical link loss is absorbed by the exact substitution
    zeta_o -> eta * zeta_o.
    """
    c = p.cooperativity
    zo = p.eta * p.zeta_o
    zm = p.zeta_m
    denom = (1.0 - c) ** 2
    u = 1.0 + 8.0 * zm * (c + p.n_in * (1.0 - zm)) / denom
    v = 4.0 * np.sqrt(zo * zm * c) * (1.0 + c + 2.0 * p.n_in * (1.0 - zm)) / denom
    w = 1.0 + 8.0 * c * zo * (1.0 + p.n_in * (1.0 - zm)) / denom
    return UVWTriple(u, v, w)


def mo_state(uvw: UVWTriple) -> TwoModeGaussian:
    """Noisy TMSV state of the (microwave, optical) mode pair."""
    cov = 0.5 * np.block([[uvw.u * I2, uvw.v * Z2], [uvw.v * Z2, uvw.w * I2]])
    return TwoModeGaussian(np.zeros(4), cov)


def standard_form(state: TwoModeGaussian, tol: float = 1e-10) -> tuple[float, float, float]:
    """Extract (a, b, c) from a standard-form covariance (1/2)[[aI, cZ], [cZ, bI]].

    Rejects covariances that are not entrywise in standard form.
    """
    m = 2.0 * state.cov
    a, b, c = m[0, 0], m[2, 2], m[0, 2]
    target = np.block([[a * I2, c * Z2], [c * Z2, b * I2]])
    if np.max(np.abs(m - target)) > tol:
        raise ValueError("covariance is not in standard form")
    return a, b, c


def cv_swap(uvw: UVWTriple) -> tuple[TwoModeGaussian, float]:
    """Microwave-microwave state after optical interference, homodyne and displacement.

    Returns the zero-mean conditional state together with the displacement
    gain v/2w that cancels the homodyne-conditioned mean.
    """
    if uvw.w <= 0.0:
        raise ValueError(f"w must be positive, got {uvw.w}")
    diag = uvw.u - uvw.v**2 / (2.0 * uvw.w)
    off = uvw.v**2 / (2.0 * uvw.w)
    cov = 0.5 * np.block([[diag * I2, off * Z2], [off * Z2, diag * I2]])
    gain = uvw.v / (2.0 * uvw.w)
    return TwoModeGaussian(np.zeros(4), cov), gain


def teleport_swap(uvw: UVWTriple, r: float) -> TwoModeGaussian:
    """Microwave-microwave state from the CV-teleportation variant.

    The ancillary optical TMSV has squeezing parameter r; the infinite
    squeezing limit recovers the direct swap output.
    """
    ch, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    denom = 1.0 + uvw.w**2 + 2.0 * uvw.w * ch
    diag = uvw.u - uvw.v**2 * (uvw.w + ch) / denom
    off = uvw.v**2 * sh / denom
    cov = 0.5 * np.block([[diag * I2, off * Z2], [off * Z2, diag * I2]])
    return TwoModeGaussian(np.zeros(4), cov)


def balanced_beamsplitter() -> np.ndarray:
    """4x4 symplectic matrix of a balanced beamsplitter on two modes."""
    return np.block([[I2, I2], [-I2, I2]]) / np.sqrt(2.0)


def composite_swap_cov(uvw: UVWTriple) -> np.ndarray:
    """8x8 covariance of the four-mode system (M1, M2, O1, O2) before the swap."""
    zero = np.zeros((2, 2))
    u, v, w = uvw.u, uvw.v, uvw.w
    return 0.5 * np.block(
        [
            [u * I2, zero, v * Z2, zero],
            [zero, u * I2, zero, v * Z2],
            [v * Z2, zero, w * I2, zero],
            [zero, v * Z2, zero, w * I2],
        ]
    )


def homodyne_condition(
    cov: np.ndarray, keep: list[int], measured: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Condition a Gaussian state on homodyne outcomes via a Schur complement.

    Args:
        cov: full covariance matrix (2n x 2n).
        keep: quadrature indices of the surviving modes.
        measured: measured quadrature indices (one per detected mode); the
            conjugate quadratures of the detected modes are integrated out.

    Returns:
        (conditional covariance on ``keep``, gain matrix) where the gain maps
        the measured quadrature outcomes to the conditional mean of ``keep``.

    The measured block is projected with zeroed rows/columns for the
    unmeasured quadratures, so a Moore-Penrose pseudo-inverse is used.
    """
    keep = list(keep)
    rest = [i for i in range(cov.shape[0]) if i not in keep]
    if not set(measured) <= set(rest):
        raise ValueError("measured quadratures must lie outside the kept modes")
    c1 = cov[np.ix_(keep, keep)]
    c2 = cov[np.ix_(rest, rest)]
    c3 = cov[np.ix_(keep, rest)]
    mask = np.isin(rest, measured).astype(float)
    proj = np.diag(mask)
    pinv = np.linalg.pinv(proj @ c2 @ proj, hermitian=True)
    cond = c1 - c3 @ pinv @ c3.T
    gain = (c3 @ pinv)[:, mask.astype(bool)]
    return cond, gain


def beamsplitter_and_homodyne(uvw: UVWTriple) -> tuple[TwoModeGaussian, np.ndarray]:
    """Run the explicit swap chain: beamsplitter on the optical pair, then
    homodyne of q- and p+ with Schur-complement conditioning.

    Returns the conditional microwave state (before displacement the mean is
    gain-dependent; the displaced state is zero-mean) and the gain matrix
    mapping the two measured quadratures to the conditional mean.
    """
    cov = composite_swap_cov(uvw)
    # beamsplitter acts on the (O1, O2) quadrature block
    s_bs = np.eye(8)
    s_bs[4:, 4:] = balanced_beamsplitter()
    cov_bs = s_bs @ cov @ s_bs.T
    # measured: p of O1' (index 5) and q of O2' (index 6)
    cond, gain = homodyne_condition(cov_bs, keep=[0, 1, 2, 3], measured=[5, 6])
    cond = 0.5 * (cond + cond.T)
    return TwoModeGaussian(np.zeros(4), cond), gain


def apply_optical_loss(p: TransducerParams, eta: float) -> TransducerParams:
    """Fold an additional pure-loss transmissivity into the link parameters.

    Exact: downstream covariances only depend on the product eta * zeta_o.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return replace(p, eta=p.eta * eta)


def loss_map_uvw(uvw: UVWTriple, eta: float) -> UVWTriple:
    """Explicit pure-loss channel on the optical arm of a (u, v, w) state."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return UVWTriple(uvw.u, np.sqrt(eta) * uvw.v, (1.0 - eta) + eta * uvw.w)


def swap_mean_photon(uvw: UVWTriple) -> float:
    """Mean photon number per mode of the cv_swap output state."""
    diag = uvw.u - uvw.v**2 / (2.0 * uvw.w)
    return (diag - 1.0) / 2.0


def ideal_mean_photon(cooperativity: float) -> float:
    """Closed-form mean photon number of the lossless swap output."""
    c = cooperativity
    return 16.0 * c**2 / ((1.0 - c) ** 2 * (1.0 + 6.0 * c + c**2))
