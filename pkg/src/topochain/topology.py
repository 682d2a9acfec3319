"""Winding invariants, skin-effect diagnostics, and state classification."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuit import RealSpaceMatrix, hoppings
from .errors import GapUnknown, OriginCrossing, OutOfRange, SpectrumHit
from .params import Boundary, CircuitParams
from .spectral import BandSet, ChainSpectrum, band_trace, midpoint_grid

ORIGIN_TOL = 1e-10
# a single polygon segment turning more than this around the origin means
# the curve passes closer to the origin than the sampling resolves; the
# winding of such a curve is not certified
MAX_SEGMENT_TURN = np.pi / 2
MIN_WINDING_SAMPLES = 64


def _admittance_plane_curve(params: CircuitParams,
                            branch: np.ndarray,
                            k_grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real-projected admittance vector (Re y_x, Re y_y) along a branch."""
    vs = np.empty(len(branch), dtype=complex)
    ws = np.empty(len(branch), dtype=complex)
    for j, om in enumerate(branch):
        hp = hoppings(params, om)
        vs[j], ws[j] = hp.v, hp.w
    x = (vs + ws * np.cos(k_grid)).real
    y = (ws * np.sin(k_grid)).real
    return x, y


def _check_away_from_origin(x: np.ndarray, y: np.ndarray) -> None:
    r = np.hypot(x, y)
    if r.min() < ORIGIN_TOL * max(1.0, r.max()):
        raise OriginCrossing(
            f"admittance curve passes within {r.min():.3e} of the origin; "
            f"winding undefined"
        )
    ang = np.arctan2(y, x)
    dang = np.diff(ang, append=ang[0])
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    if np.max(np.abs(dang)) > MAX_SEGMENT_TURN:
        raise OriginCrossing(
            f"one curve segment turns {np.max(np.abs(dang)):.3f} rad around "
            f"the origin; the near-origin passage is unresolved and the "
            f"winding undefined"
        )


def winding_number(params: CircuitParams,
                   branch: np.ndarray,
                   k_grid: np.ndarray | None = None) -> int:
    """Signed turns of the real-projected admittance vector around the origin.

    The branch must sample one full period of k; with no explicit grid the
    standard half-offset grid of matching length is assumed.  Accumulates
    wrapped angle increments between consecutive samples and closes the curve
    back to its first point, so the result is an exact integer for any curve
    sampled finely enough that no single step turns by more than pi.
    """
    branch = np.asarray(branch)
    if len(branch) < MIN_WINDING_SAMPLES:
        raise OutOfRange(
            f"branch has {len(branch)} samples; need >= {MIN_WINDING_SAMPLES}"
        )
    if k_grid is None:
        k_grid = midpoint_grid(len(branch))
    x, y = _admittance_plane_curve(params, branch, np.asarray(k_grid))
    _check_away_from_origin(x, y)
    ang = np.arctan2(y, x)
    dang = np.diff(ang, append=ang[0])
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    total = dang.sum() / (2.0 * np.pi)
    rounded = int(np.rint(total))
    if abs(total - rounded) > 1e-6:
        raise OriginCrossing(
            f"winding accumulated to {total:.6f}, not close to an integer; "
            f"refine the grid"
        )
    return rounded


def winding_quadrature(params: CircuitParams,
                       branch: np.ndarray,
                       k_grid: np.ndarray | None = None) -> float:
    """Independent route: trapezoid quadrature of (x dy - y dx)/(x^2+y^2).

    Returns the raw (unrounded) value so tests can compare routes without
    the rounding step hiding disagreement.
    """
    branch = np.asarray(branch)
    if k_grid is None:
        k_grid = midpoint_grid(len(branch))
    x, y = _admittance_plane_curve(params, branch, np.asarray(k_grid))
    _check_away_from_origin(x, y)
    xc = np.append(x, x[0])
    yc = np.append(y, y[0])
    dx = np.diff(xc)
    dy = np.diff(yc)
    xm = 0.5 * (xc[1:] + xc[:-1])
    ym = 0.5 * (yc[1:] + yc[:-1])
    return float(np.sum((xm * dy - ym * dx) / (xm * xm + ym * ym)) / (2.0 * np.pi))


def winding_crossings(params: CircuitParams,
                      branch: np.ndarray,
                      k_grid: np.ndarray | None = None) -> int:
    """Second independent route: signed crossings of the positive x axis."""
    branch = np.asarray(branch)
    if k_grid is None:
        k_grid = midpoint_grid(len(branch))
    x, y = _admittance_plane_curve(params, branch, np.asarray(k_grid))
    _check_away_from_origin(x, y)
    xc = np.append(x, x[0])
    yc = np.append(y, y[0])
    total = 0
    for j in range(len(xc) - 1):
        y0, y1 = yc[j], yc[j + 1]
        if y0 == 0.0 or y0 * y1 >= 0.0:
            continue
        t = y0 / (y0 - y1)
        x_at = xc[j] + t * (xc[j + 1] - xc[j])
        if x_at > 0.0:
            total += 1 if y1 > y0 else -1
    return total


@dataclass(frozen=True)
class WindingResult:
    label: str
    winding: int
    quadrature: float
    curve_min_radius: float


def winding_per_branch(params: CircuitParams, band: BandSet) -> dict[str, WindingResult]:
    """Winding results for every branch whose curve clears the origin.

    Branches whose admittance curve dips through the exceptional point (the
    gapless, axis-visiting ones) are omitted rather than reported with a
    non-robust integer; callers detect them as missing keys.
    """
    out = {}
    for lab, branch in band.branches.items():
        x, y = _admittance_plane_curve(params, branch, band.k_grid)
        try:
            out[lab] = WindingResult(
                label=lab,
                winding=winding_number(params, branch, band.k_grid),
                quadrature=winding_quadrature(params, branch, band.k_grid),
                curve_min_radius=float(np.hypot(x, y).min()),
            )
        except OriginCrossing:
            continue
    return out


@dataclass(frozen=True)
class SkinWindingResult:
    base_point: complex
    winding: int
    trajectory: np.ndarray


def _branch_select(band: BandSet, omega: complex) -> str:
    best, best_d = None, np.inf
    for lab, branch in band.branches.items():
        d = np.abs(branch - omega).min()
        if d < best_d:
            best, best_d = lab, d
    return best


def _offdiag_product(params: CircuitParams, band: BandSet,
                     label: str) -> np.ndarray:
    """(v + w e^{-ik})(v + w e^{+ik}) along a tracked branch."""
    branch = band.branches[label]
    out = np.empty(len(branch), dtype=complex)
    for j, (om, k) in enumerate(zip(branch, band.k_grid)):
        hp = hoppings(params, om)
        out[j] = (hp.v + hp.w * np.exp(-1j * k)) \
            * (hp.v + hp.w * np.exp(+1j * k))
    return out


def _complex_winding(traj: np.ndarray) -> int:
    ang = np.angle(traj)
    dang = np.diff(ang, append=ang[0])
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    return int(np.rint(dang.sum() / (2.0 * np.pi)))


def skin_winding(params: CircuitParams, omega: complex, e0: complex,
                 n_k: int = 512, band: BandSet | None = None) -> SkinWindingResult:
    """Point-gap winding of det(Y - E0) along the branch nearest omega.

    omega picks which tracked branch to follow; the trajectory itself runs
    over the whole zone.  A base point sitting on the trajectory makes the
    count undefined and raises SpectrumHit.
    """
    if band is None:
        band = band_trace(params, n_k)
    label = _branch_select(band, omega)
    traj = e0 * e0 - _offdiag_product(params, band, label)
    scale = max(1.0, float(np.abs(traj).max()))
    if np.abs(traj).min() < 1e-12 * scale:
        raise SpectrumHit(
            f"base point {e0} lies on the admittance spectrum "
            f"(min |det| = {np.abs(traj).min():.3e})"
        )
    return SkinWindingResult(base_point=complex(e0),
                             winding=_complex_winding(traj),
                             trajectory=traj)


def _first_witness(cands: np.ndarray, qq: np.ndarray) -> complex | None:
    traj = cands[:, None] ** 2 - qq[None, :]
    scale = np.maximum(1.0, np.abs(traj).max(axis=1))
    valid = np.abs(traj).min(axis=1) >= 1e-12 * scale
    ang = np.angle(traj)
    dang = np.diff(ang, append=ang[:, :1], axis=1)
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    windings = np.rint(dang.sum(axis=1) / (2.0 * np.pi)).astype(int)
    hits = np.nonzero(valid & (windings != 0))[0]
    if len(hits):
        return complex(cands[hits[0]])
    return None


def skin_effect_present(params: CircuitParams, omega: complex,
                        n_k: int = 512, scan: int = 50,
                        band: BandSet | None = None) -> tuple[bool, complex | None]:
    """Scan base points for a nonzero point-gap winding on the chosen branch.

    Two candidate families are tried in order.  First a raster over the
    bounding box of the branch's admittance eigenvalue loci +-sqrt(q+ q-),
    inflated by 10%.  If the raster is blank, midpoints between each locus
    sheet and its own k -> 2pi - k reflection: whenever the branch is
    non-reciprocal the sheets fail to retrace and those midpoints sit inside
    the enclosed sliver, however thin.  Returns the first witness found, or
    (False, None).
    """
    if band is None:
        band = band_trace(params, n_k)
    label = _branch_select(band, omega)
    qq = _offdiag_product(params, band, label)
    rad = np.sqrt(qq)
    locs = np.concatenate([rad, -rad])
    re_lo, re_hi = locs.real.min(), locs.real.max()
    im_lo, im_hi = locs.imag.min(), locs.imag.max()
    re_pad = 0.1 * max(re_hi - re_lo, 1e-6)
    im_pad = 0.1 * max(im_hi - im_lo, 1e-6)
    res = np.linspace(re_lo - re_pad, re_hi + re_pad, scan)
    ims = np.linspace(im_lo - im_pad, im_hi + im_pad, scan)
    grid = (res[None, :] + 1j * ims[:, None]).ravel()
    witness = _first_witness(grid, qq)
    if witness is None:
        step = max(1, len(rad) // 128)
        for sheet in (rad, -rad, np.conj(rad)):
            mids = 0.5 * (sheet + sheet[::-1])[::step]
            witness = _first_witness(mids, qq)
            if witness is not None:
                break
    if witness is not None:
        return True, witness
    return False, None


def classify_states(spectrum: ChainSpectrum, gap: float) -> ChainSpectrum:
    """Label each state Edge, Skin, or Bulk.

    Edge: eigenvalue magnitude under half the bulk gap and inverse
    participation ratio above 5/(2N).  Skin: over half the total weight on
    one 10% end of the chain with at least 3x asymmetry over the other end.
    Requires an open-chain spectrum and a positive gap.
    """
    if spectrum.boundary is not Boundary.OPEN:
        raise GapUnknown("classification is defined for open chains only")
    if not gap > 0.0:
        raise GapUnknown(f"need a positive bulk gap, got {gap}")
    n = spectrum.n_states
    labels = []
    for i in range(n):
        lam = spectrum.eigenvalues[i]
        ipr = spectrum.ipr[i]
        lw, rw = spectrum.left_weight[i], spectrum.right_weight[i]
        if abs(lam) < 0.5 * gap and ipr > 5.0 / n:
            labels.append("Edge")
        elif (lw > 0.5 and lw > 3.0 * max(rw, 1e-300)) or \
             (rw > 0.5 and rw > 3.0 * max(lw, 1e-300)):
            labels.append("Skin")
        else:
            labels.append("Bulk")
    return replace(spectrum, labels=tuple(labels))


def center_of_mass_shift(spectrum: ChainSpectrum) -> float:
    """Mean state displacement from the chain midpoint, in sites.

    Positive values mean weight accumulated toward the high-index end.
    Translation symmetry pins the periodic-chain value at zero, so this is
    the skin-effect order parameter for open chains.
    """
    n = spectrum.n_states
    sites = np.arange(n)
    mags = np.abs(spectrum.eigenvectors) ** 2
    centers = sites @ mags
    return float(centers.mean() - 0.5 * (n - 1))


def perturb_chain(matrix: RealSpaceMatrix, cells: tuple[int, ...],
                  fraction: float) -> RealSpaceMatrix:
    """Scale the hopping entries touching the given cells by (1 + fraction).

    For each listed cell this rescales its internal bond and the bond to the
    next cell, both matrix directions, leaving everything else bitwise
    intact.  fraction is capped at 0.2 to stay in the gentle-disorder regime.
    """
    if not 0.0 <= fraction <= 0.2:
        raise OutOfRange(f"fraction {fraction} outside [0, 0.2]")
    n = matrix.params.n_cells
    for c in cells:
        if not 0 <= c < n:
            raise OutOfRange(f"cell index {c} outside [0, {n})")
    out = matrix.entries.copy()
    size = 2 * n
    for c in cells:
        a, b = 2 * c, 2 * c + 1
        out[a, b] *= 1.0 + fraction
        out[b, a] *= 1.0 + fraction
        nxt = (b + 1) % size
        if nxt != b + 1 and matrix.params.boundary is not Boundary.PERIODIC:
            continue
        out[b, nxt] *= 1.0 + fraction
        out[nxt, b] *= 1.0 + fraction
    return RealSpaceMatrix(entries=out, params=matrix.params, omega=matrix.omega)


@dataclass(frozen=True)
class PerturbationReport:
    baseline: ChainSpectrum
    perturbed: ChainSpectrum
    matched_pairs: tuple[tuple[int, int], ...]
    edge_state_drift: float
    skin_state_drift: float
    bulk_state_drift: float
    max_eigenvalue_shift: float


def compare_perturbed(baseline: ChainSpectrum, perturbed: ChainSpectrum,
                      gap: float) -> PerturbationReport:
    """Match spectra greedily by eigenvalue distance and measure state drift.

    matched_pairs holds (baseline index, perturbed index).  Drift is the
    2-norm change of the magnitude profile |psi| between matched states,
    reported separately per baseline label.  Baseline must be classified.
    """
    if baseline.labels is None:
        raise GapUnknown("baseline spectrum is unclassified")
    n = baseline.n_states
    taken = np.zeros(n, dtype=bool)
    pairs = []
    drift_by = {"Edge": 0.0, "Skin": 0.0, "Bulk": 0.0}
    max_shift = 0.0
    order = np.argsort(-np.abs(baseline.eigenvalues))
    for i in order:
        d = np.abs(perturbed.eigenvalues - baseline.eigenvalues[i])
        d[taken] = np.inf
        j = int(np.argmin(d))
        taken[j] = True
        pairs.append((int(i), j))
        max_shift = max(max_shift, float(d[j]))
        drift = float(np.linalg.norm(
            np.abs(perturbed.eigenvectors[:, j]) - np.abs(baseline.eigenvectors[:, i])
        ))
        lab = baseline.labels[i]
        drift_by[lab] = max(drift_by[lab], drift)
    return PerturbationReport(
        baseline=baseline,
        perturbed=perturbed,
        matched_pairs=tuple(pairs),
        edge_state_drift=drift_by["Edge"],
        skin_state_drift=drift_by["Skin"],
        bulk_state_drift=drift_by["Bulk"],
        max_eigenvalue_shift=max_shift,
    )
