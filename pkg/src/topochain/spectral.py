"""Natural oscillation frequencies, band tracking, and finite-chain spectra.

The source-free modes at wavenumber k solve Lambda(omega)^2 = det-quadratic
of the cell's off-diagonal weights.  Clearing denominators by
omega^4 L^2 eta1^2 eta2^2 turns that condition into a degree-6 polynomial in
omega whose two extra roots are the dissipative poles i/(R1 C1), i/(R2 C2);
the remaining four are the physical band families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .circuit import bloch_admittance, chain_matrix_from_hoppings, hoppings, lambda_diag
from .errors import (
    ConvergenceFailure,
    DegenerateLeadingCoefficient,
    OutOfRange,
    RootResidualTooLarge,
    TrackingAmbiguous,
)
from .params import Boundary, CircuitParams

# coefficient magnitudes below this fraction of the largest are treated as zero
LEADING_TOL = 1e-14
# back-substitution gate, relative to sum_j |c_j| |omega|^j
ROOT_RESIDUAL_TOL = 1e-7
# |Re omega| below this fraction of scale marks a purely imaginary root
AXIS_TOL = 1e-8
BRANCH_LABELS = ("omega3", "omega4", "omega5", "omega6")


def band_polynomial_coefficients(params: CircuitParams, k: float) -> np.ndarray:
    """Ascending coefficients c[0..6] of the frequency polynomial at fixed k.

    Built by polynomial convolution from the building blocks
    eta1 = 1 + i R1 C1 omega, eta2 = 1 + i R2 C2 omega,
    A = L C1 omega^2 eta2, B = L C2 omega^2 eta1, P = eta1 eta2 - A - B:
    p = P^2 - A^2 - B^2 - 2 cos k * A B.
    Raises DegenerateLeadingCoefficient when the degree collapses (lossless
    limit, or k at an exact zone endpoint where the top coefficient vanishes).
    """
    eta1 = np.array([1.0, 1j * params.r1 * params.c1])
    eta2 = np.array([1.0, 1j * params.r2 * params.c2])
    a = np.zeros(4, dtype=complex)
    a[2:] = params.l * params.c1 * eta2
    b = np.zeros(4, dtype=complex)
    b[2:] = params.l * params.c2 * eta1
    p = np.zeros(4, dtype=complex)
    p[:3] = np.convolve(eta1, eta2)
    p -= a + b
    coeffs = np.convolve(p, p) - np.convolve(a, a) - np.convolve(b, b) \
        - 2.0 * np.cos(k) * np.convolve(a, b)
    if abs(coeffs[-1]) < LEADING_TOL * np.max(np.abs(coeffs)):
        raise DegenerateLeadingCoefficient(
            f"degree-6 coefficient vanished at k={k:.6g} "
            f"(lossless limit or zone endpoint)"
        )
    return coeffs


def _raw_coefficients(params: CircuitParams, k: float) -> np.ndarray:
    """Same coefficients without the degeneracy gate (internal solver path)."""
    eta1 = np.array([1.0, 1j * params.r1 * params.c1])
    eta2 = np.array([1.0, 1j * params.r2 * params.c2])
    a = np.zeros(4, dtype=complex)
    a[2:] = params.l * params.c1 * eta2
    b = np.zeros(4, dtype=complex)
    b[2:] = params.l * params.c2 * eta1
    p = np.zeros(4, dtype=complex)
    p[:3] = np.convolve(eta1, eta2)
    p -= a + b
    return np.convolve(p, p) - np.convolve(a, a) - np.convolve(b, b) \
        - 2.0 * np.cos(k) * np.convolve(a, b)


@dataclass(frozen=True)
class FrequencyRoots:
    k: float
    roots: np.ndarray            # all finite roots, multiplicity included
    pole_roots: np.ndarray       # the two roots matched to i/(R C)
    physical_roots: np.ndarray   # the rest, sorted lexicographic (Re, Im)


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    d = npoly.polyder(coeffs)
    for _ in range(steps):
        pv = npoly.polyval(roots, coeffs)
        dv = npoly.polyval(roots, d)
        ok = np.abs(dv) > 0
        roots = np.where(ok, roots - np.where(ok, pv / np.where(ok, dv, 1.0), 0.0), roots)
    return roots


def _scaled_residual(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    # |p(omega)| relative to the magnitude sum of its terms; stays O(eps)
    # for backward-stable roots of any magnitude
    powers = np.abs(roots[:, None]) ** np.arange(len(coeffs))[None, :]
    scale = powers @ np.abs(coeffs)
    return np.abs(npoly.polyval(roots, coeffs)) / np.maximum(scale, 1e-300)


def natural_frequencies(params: CircuitParams, k: float) -> FrequencyRoots:
    """All finite roots at k, the poles filtered out of the physical set.

    Degree-deficient cases (lossless circuit; exact zone endpoints) return
    fewer than six roots; for R1, R2 > 0 and k strictly inside (0, 2pi) the
    count is always six.
    """
    coeffs = _raw_coefficients(params, k)
    cut = len(coeffs)
    top = np.max(np.abs(coeffs))
    while cut > 1 and abs(coeffs[cut - 1]) < LEADING_TOL * top:
        cut -= 1
    trimmed = coeffs[:cut]
    roots = np.roots(trimmed[::-1])
    roots = _polish(trimmed, roots)
    res = _scaled_residual(trimmed, roots)
    if np.any(res > ROOT_RESIDUAL_TOL):
        raise RootResidualTooLarge(
            f"worst root residual {res.max():.3e} at k={k:.6g}"
        )
    pole_idx = []
    for pole in params.pole_frequencies():
        if not np.isfinite(pole):
            continue
        order = np.argsort(np.abs(roots - pole))
        for idx in order:
            if idx not in pole_idx:
                pole_idx.append(int(idx))
                break
    pole_roots = roots[pole_idx]
    physical = np.delete(roots, pole_idx)
    physical = physical[np.lexsort((physical.imag, physical.real))]
    return FrequencyRoots(k=float(k), roots=roots, pole_roots=pole_roots,
                          physical_roots=physical)


@dataclass(frozen=True)
class BandSet:
    """Four frequency branches tracked over the zone.

    k_grid is the half-offset uniform grid (j + 1/2) * 2pi / n_k, which keeps
    clear of the zone endpoints where one root diverges.  closure_permutation
    maps each branch to the branch whose first value its last value continues
    into, so the branch set is periodic as a multiset even when individual
    branches exchange identities over one period.
    """

    k_grid: np.ndarray
    branches: dict[str, np.ndarray]
    continuity_residual: dict[str, float]
    closure_permutation: tuple[int, ...]
    params: CircuitParams = field(repr=False)

    def branch(self, label: str) -> np.ndarray:
        return self.branches[label]


def _axis_mask(values: np.ndarray) -> np.ndarray:
    return np.abs(values.real) < AXIS_TOL * np.maximum(np.abs(values), 1.0)


def _continue_step(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Assign the 4 new roots to the 4 branch slots.

    Generic steps use minimum-distance assignment.  Steps where an
    imaginary-axis pair collides and splits off-axis (or the reverse) are
    square-root branch points; there the minimum-distance cost is degenerate,
    so a fixed continuation convention is applied instead: the larger-|Im|
    axis root continues into the Re > 0 member of the newborn pair, the
    smaller into Re < 0 (and the mirrored rule when the pair re-merges).
    This keeps the assignment deterministic and grid-independent.
    """
    ax_prev, ax_new = _axis_mask(prev), _axis_mask(new)
    assign = np.empty(4, dtype=int)
    if ax_prev.sum() == 2 and ax_new.sum() == 0:
        slots = np.where(ax_prev)[0]
        slots = slots[np.argsort(prev[slots].imag)]          # small, large |Im|
        center = prev[slots].mean()
        born = np.argsort(np.abs(new - center))[:2]
        born = born[np.argsort(new[born].real)]              # Re<0, Re>0
        assign[slots[1]] = born[1]
        assign[slots[0]] = born[0]
        rest_slots = np.where(~ax_prev)[0]
        rest_roots = np.array([i for i in range(4) if i not in set(born.tolist())])
        cost = np.abs(prev[rest_slots][:, None] - new[rest_roots][None, :])
        rr, cc = linear_sum_assignment(cost)
        assign[rest_slots[rr]] = rest_roots[cc]
        return assign
    if ax_prev.sum() == 0 and ax_new.sum() == 2:
        targets = np.where(ax_new)[0]
        targets = targets[np.argsort(new[targets].imag)]     # small, large |Im|
        center = new[targets].mean()
        dying = np.argsort(np.abs(prev - center))[:2]
        dying = dying[np.argsort(prev[dying].real)]          # Re<0, Re>0
        assign[dying[1]] = targets[0]
        assign[dying[0]] = targets[1]
        rest_slots = np.array([i for i in range(4) if i not in set(dying.tolist())])
        rest_roots = np.array([i for i in range(4) if i not in set(targets.tolist())])
        cost = np.abs(prev[rest_slots][:, None] - new[rest_roots][None, :])
        rr, cc = linear_sum_assignment(cost)
        assign[rest_slots[rr]] = rest_roots[cc]
        return assign
    cost = np.abs(prev[:, None] - new[None, :])
    rr, cc = linear_sum_assignment(cost)
    assign[rr] = cc
    return assign


def _canonical_first(values: np.ndarray) -> np.ndarray:
    # snap fp noise on the axis so the label order cannot depend on it
    re = np.where(_axis_mask(values), 0.0, values.real)
    return np.lexsort((values.imag, re))


def track_on_grid(params: CircuitParams, k_grid: np.ndarray) -> BandSet:
    """Continuity-track the four physical roots over an arbitrary k grid."""
    ks = np.asarray(k_grid, dtype=float)
    n_k = len(ks)
    traced = np.empty((n_k, 4), dtype=complex)
    first = natural_frequencies(params, ks[0]).physical_roots
    if len(first) != 4:
        raise TrackingAmbiguous(
            f"expected 4 physical roots at k={ks[0]:.6g}, got {len(first)}"
        )
    traced[0] = first[_canonical_first(first)]
    for j in range(1, n_k):
        roots = natural_frequencies(params, ks[j]).physical_roots
        if len(roots) != 4:
            raise TrackingAmbiguous(
                f"expected 4 physical roots at k={ks[j]:.6g}, got {len(roots)}"
            )
        gaps = np.abs(roots[:, None] - roots[None, :])[np.triu_indices(4, 1)]
        if gaps.min() < 1e-10:
            raise TrackingAmbiguous(
                f"physical roots within {gaps.min():.3e} of each other "
                f"near k={ks[j]:.6g}; refine the grid"
            )
        traced[j] = roots[_continue_step(traced[j - 1], roots)]
    last = traced[-1]
    cost = np.abs(last[:, None] - traced[0][None, :])
    rr, cc = linear_sum_assignment(cost)
    closure = tuple(int(cc[np.argsort(rr)][i]) for i in range(4))
    branches = {lab: traced[:, i] for i, lab in enumerate(BRANCH_LABELS)}
    resid = {
        lab: float(np.max(np.abs(np.diff(branches[lab]))))
        for lab in BRANCH_LABELS
    }
    return BandSet(k_grid=ks, branches=branches, continuity_residual=resid,
                   closure_permutation=closure, params=params)


def midpoint_grid(n_k: int) -> np.ndarray:
    return (np.arange(n_k) + 0.5) * (2.0 * np.pi / n_k)


def band_trace(params: CircuitParams, n_k: int) -> BandSet:
    """Track the four branches on the standard half-offset grid."""
    if n_k < 64:
        raise TrackingAmbiguous(f"n_k={n_k} too coarse; need >= 64")
    return track_on_grid(params, midpoint_grid(n_k))


def lambda_spectrum(params: CircuitParams, band: BandSet) -> dict[str, np.ndarray]:
    """Lambda(omega(k)) along each branch, for band-structure output."""
    return {
        lab: np.array([lambda_diag(params, om) for om in band.branches[lab]])
        for lab in BRANCH_LABELS
    }


def bulk_gap(params: CircuitParams, omega_branch: np.ndarray) -> float:
    """Gap 2*Delta with Delta = min_k |Lambda| along the given branch."""
    omega_branch = np.asarray(omega_branch)
    if omega_branch.size == 0:
        raise ValueError("empty branch")
    lam = np.array([lambda_diag(params, om) for om in omega_branch])
    return 2.0 * float(np.min(np.abs(lam)))


@dataclass(frozen=True)
class ChainSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray     # column i pairs with eigenvalues[i]
    ipr: np.ndarray
    left_weight: np.ndarray
    right_weight: np.ndarray
    boundary: Boundary
    labels: tuple[str, ...] | None = None

    @property
    def n_states(self) -> int:
        return len(self.eigenvalues)


def eigendecompose(matrix, boundary: Boundary | None = None) -> ChainSpectrum:
    """Dense non-Hermitian eigendecomposition with localization metrics.

    Accepts a RealSpaceMatrix or a bare 2N x 2N array.  Eigenpairs are sorted
    lexicographically by (Re, Im) and each right eigenvector is normalized to
    unit 2-norm; the residual gate scales with the matrix norm.
    """
    if hasattr(matrix, "entries"):
        m = matrix.entries
        boundary = matrix.params.boundary if boundary is None else boundary
    else:
        m = np.asarray(matrix, dtype=complex)
        boundary = Boundary.OPEN if boundary is None else boundary
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    try:
        vals, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.lexsort((vals.imag, vals.real))
    vals, vecs = vals[order], vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    scale = max(1.0, float(np.linalg.norm(m, np.inf)))
    resid = np.linalg.norm(m @ vecs - vecs * vals[None, :], axis=0)
    if np.any(resid > 1e-8 * scale):
        raise ConvergenceFailure(
            f"worst eigen-residual {resid.max():.3e} exceeds {1e-8 * scale:.3e}"
        )
    mags = np.abs(vecs) ** 2
    tenth = max(1, m.shape[0] // 10)
    return ChainSpectrum(
        eigenvalues=vals,
        eigenvectors=vecs,
        ipr=np.sum(mags * mags, axis=0),
        left_weight=np.sum(mags[:tenth, :], axis=0),
        right_weight=np.sum(mags[-tenth:, :], axis=0),
        boundary=boundary,
    )


def branch_effective_matrix(
    params: CircuitParams,
    band: BandSet,
    label: str,
    boundary: Boundary | None = None,
) -> np.ndarray:
    """Real-space matrix that follows one tracked branch.

    At fixed omega the open chain's hopping pattern reads the same from both
    ends, which forces every eigenvector magnitude to be mirror symmetric;
    no single-frequency matrix can show one-sided accumulation.  Following a
    branch restores k-dependent weights: the matrix is the block-Toeplitz
    inverse Fourier transform of Y(omega_b(k), k) over the tracking grid,
    and branches that exchange identities at the square-root collisions are
    genuinely non-reciprocal.
    """
    n = params.n_cells
    ks = band.k_grid
    if len(ks) < 2 * n - 1:
        raise OutOfRange(
            f"band grid too coarse for n_cells={n}: need n_k >= {2 * n - 1}"
        )
    omegas = band.branches[label]
    y = np.zeros((len(ks), 2, 2), dtype=complex)
    for j, (om, k) in enumerate(zip(omegas, ks)):
        hp = hoppings(params, om)
        y[j, 0, 1] = hp.v + hp.w * np.exp(-1j * k)
        y[j, 1, 0] = hp.v + hp.w * np.exp(+1j * k)
    ms = np.arange(-(n - 1), n)
    phases = np.exp(-1j * np.outer(ms, ks))
    blocks = np.tensordot(phases, y, axes=(1, 0)) / len(ks)
    size = 2 * n
    out = np.zeros((size, size), dtype=complex)
    periodic = (boundary or params.boundary) is Boundary.PERIODIC
    # c_m couples cell j to cell j + m, so m is a column offset
    for mi, m in enumerate(ms):
        blk = blocks[mi]
        for i in range(n):
            jj = i + m
            if periodic:
                jj %= n
            elif not (0 <= jj < n):
                continue
            out[2 * i:2 * i + 2, 2 * jj:2 * jj + 2] += blk
    return out


def dimer_reference_matrix(v: complex, w: complex, n_cells: int,
                           boundary: Boundary = Boundary.OPEN) -> np.ndarray:
    """Constant-weight chain used by oracle tests (textbook limit)."""
    return chain_matrix_from_hoppings(v, w, n_cells, boundary)
