"""Frequency-dependent matrix assembly for the RLC chain.

The chain alternates two series RC pairs between neighboring nodes and
grounds every node through an inductor.  At complex frequency omega the
branch admittance of a series RC pair is a complex "hopping" weight; the
two-site Bloch cell and the finite open/periodic chain are assembled from
those weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEta, ZeroFrequency
from .params import Boundary, CircuitParams, ETA_FLOOR, OMEGA_FLOOR

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class HoppingPair:
    """Intracell (v) and intercell (w) admittance weights at one frequency."""

    v: complex
    w: complex
    omega: complex

    def magnitudes(self) -> tuple[float, float]:
        return abs(self.v), abs(self.w)

    def phases(self) -> tuple[float, float]:
        """arg v, arg w; for real omega these equal -arctan(C R omega)."""
        return float(np.angle(self.v)), float(np.angle(self.w))


def _etas(params: CircuitParams, omega: complex) -> tuple[complex, complex]:
    if abs(omega) < OMEGA_FLOOR:
        raise ZeroFrequency(f"|omega|={abs(omega):.3g} below floor {OMEGA_FLOOR}")
    eta1 = 1.0 + 1j * omega * params.r1 * params.c1
    eta2 = 1.0 + 1j * omega * params.r2 * params.c2
    if abs(eta1) < ETA_FLOOR or abs(eta2) < ETA_FLOOR:
        raise DegenerateEta(
            f"omega={omega} sits on a dissipative pole (|eta1|={abs(eta1):.3g}, "
            f"|eta2|={abs(eta2):.3g})"
        )
    return eta1, eta2


def hoppings(params: CircuitParams, omega: complex) -> HoppingPair:
    """v = -C1/(1 + i omega R1 C1), w = -C2/(1 + i omega R2 C2)."""
    eta1, eta2 = _etas(params, omega)
    return HoppingPair(v=-params.c1 / eta1, w=-params.c2 / eta2, omega=omega)


def lambda_diag(params: CircuitParams, omega: complex) -> complex:
    """Total admittance converging at a node: 1/(omega^2 L) - C1/eta1 - C2/eta2."""
    eta1, eta2 = _etas(params, omega)
    return 1.0 / (omega * omega * params.l) - params.c1 / eta1 - params.c2 / eta2


@dataclass(frozen=True)
class BlochMatrix:
    """2x2 cell matrix at fixed (omega, k), plus its sigma decomposition."""

    entries: np.ndarray
    omega: complex
    k: float
    y_x: complex
    y_y: complex


def bloch_admittance(params: CircuitParams, omega: complex, k: float) -> BlochMatrix:
    """Zero-diagonal hopping matrix: off-diagonals v + w e^{-ik} / v + w e^{+ik}.

    Decomposition accessors satisfy Y = y_x sigma_x + y_y sigma_y with
    y_x = v + w cos k and y_y = w sin k.
    """
    hp = hoppings(params, omega)
    upper = hp.v + hp.w * np.exp(-1j * k)
    lower = hp.v + hp.w * np.exp(+1j * k)
    m = np.array([[0.0, upper], [lower, 0.0]], dtype=complex)
    return BlochMatrix(
        entries=m,
        omega=omega,
        k=float(k),
        y_x=hp.v + hp.w * np.cos(k),
        y_y=hp.w * np.sin(k),
    )


def bloch_laplacian(params: CircuitParams, omega: complex, k: float) -> BlochMatrix:
    """Full cell Laplacian i*omega*[Lambda*I - Y(k)]; singular exactly on bands.

    det L / (i omega)^2 = Lambda^2 - (y_x^2 + y_y^2), so the natural modes are
    the (omega, k) pairs where Lambda(omega) is an eigenvalue of Y(k).
    """
    y = bloch_admittance(params, omega, k)
    lam = lambda_diag(params, omega)
    m = 1j * omega * (lam * np.eye(2, dtype=complex) - y.entries)
    return BlochMatrix(entries=m, omega=omega, k=float(k), y_x=y.y_x, y_y=y.y_y)


@dataclass(frozen=True)
class RealSpaceMatrix:
    """2N x 2N zero-diagonal hopping matrix of the finite chain at fixed omega.

    Basis is interleaved (A1, B1, A2, B2, ...); the matrix is complex
    symmetric (transpose-symmetric), not Hermitian, whenever R > 0.
    """

    entries: np.ndarray
    params: CircuitParams
    omega: complex


def chain_matrix_from_hoppings(
    v: complex | np.ndarray,
    w: complex | np.ndarray,
    n_cells: int,
    boundary: Boundary,
) -> np.ndarray:
    """Assemble the 2N x 2N nearest-neighbor matrix from given weights.

    v and w may be scalars or per-bond arrays (length N for v; N or N-1
    for w depending on boundary), which is what the perturbation experiment
    uses to alter a few bonds only.
    """
    n = int(n_cells)
    size = 2 * n
    vv = np.broadcast_to(np.asarray(v, dtype=complex), (n,))
    n_inter = n if boundary is Boundary.PERIODIC else n - 1
    ww = np.broadcast_to(np.asarray(w, dtype=complex), (n_inter,))
    m = np.zeros((size, size), dtype=complex)
    for j in range(n):
        a, b = 2 * j, 2 * j + 1
        m[a, b] = vv[j]
        m[b, a] = vv[j]
    for j in range(n_inter):
        b, a_next = 2 * j + 1, (2 * j + 2) % size
        m[b, a_next] = ww[j]
        m[a_next, b] = ww[j]
    return m


def real_space_matrix(params: CircuitParams, omega: complex) -> RealSpaceMatrix:
    hp = hoppings(params, omega)
    m = chain_matrix_from_hoppings(hp.v, hp.w, params.n_cells, params.boundary)
    return RealSpaceMatrix(entries=m, params=params, omega=omega)


def hermitian_reference_bands(l1: float, l2: float, c: float, k: float) -> tuple[float, float]:
    """Closed-form two-band dispersion of the lossless two-inductor ladder.

    omega_pm^2 / omega_0^2 = eta + 1/eta +- sqrt(eta^2 + eta^-2 + 2 cos k),
    eta = sqrt(L1/L2), omega_0^2 = 1/(C sqrt(L1 L2)).  Used purely as an
    independent oracle for the R -> 0 limit of this package's bands (the
    lossless chain maps onto this form with the roles of L and C exchanged).
    Returns (omega_minus^2, omega_plus^2) in units of omega_0^2.
    """
    if l1 <= 0 or l2 <= 0 or c <= 0:
        raise ValueError("l1, l2, c must be positive")
    eta = np.sqrt(l1 / l2)
    base = eta + 1.0 / eta
    radicand = eta * eta + 1.0 / (eta * eta) + 2.0 * np.cos(k)
    # radicand >= (eta - 1/eta)^2 >= 0 up to roundoff
    assert radicand > -1e-12, radicand
    root = np.sqrt(max(radicand, 0.0))
    return float(base - root), float(base + root)
