import numpy as np
import pytest

import topochain as tc
from topochain.errors import (
    GapUnknown,
    OriginCrossing,
    OutOfRange,
    SpectrumHit,
)
from topochain.topology import winding_crossings

from conftest import ROWS, assert_close, row_params

# grid-stable winding facts measured at n_k = 256 and 1024
# (tools/oracles/winding_multisets.py): the gapped m branches certify an
# integer, the gapless hybrid pair refuses with OriginCrossing everywhere
DEFINED_WINDINGS = {
    1: {"omega3": 1, "omega6": 1},
    2: {"omega3": 0, "omega6": 0},
    3: {"omega3": 1, "omega6": 1},
    4: {"omega3": 1, "omega6": 1},
}


@pytest.mark.parametrize("row", list(ROWS))
def test_winding_per_branch_frozen(row, bands_all_rows):
    band = bands_all_rows[row]
    results = tc.winding_per_branch(row_params(row), band)
    assert {lab: r.winding for lab, r in results.items()} \
        == DEFINED_WINDINGS[row]


@pytest.mark.parametrize("row", list(ROWS))
def test_hybrid_branches_raise_origin_crossing(row, bands_all_rows):
    p = row_params(row)
    band = bands_all_rows[row]
    for lab in ("omega4", "omega5"):
        with pytest.raises(OriginCrossing):
            tc.winding_number(p, band.branches[lab], band.k_grid)


def test_winding_grid_stable():
    for row in ROWS:
        p = row_params(row)
        coarse = tc.band_trace(p, 256)
        got = {lab: r.winding
               for lab, r in tc.winding_per_branch(p, coarse).items()}
        assert got == DEFINED_WINDINGS[row]


@pytest.mark.parametrize("row", list(ROWS))
def test_three_routes_agree_on_defined_branches(row, bands_all_rows):
    p = row_params(row)
    band = bands_all_rows[row]
    for lab, want in DEFINED_WINDINGS[row].items():
        br = band.branches[lab]
        assert tc.winding_number(p, br, band.k_grid) == want
        assert winding_crossings(p, br, band.k_grid) == want
        quad = tc.winding_quadrature(p, br, band.k_grid)
        assert round(quad) == want
        # midpoint quadrature of these smooth curves carries the universal
        # pi^2/(3 n^2) leading error, 3.1e-6 at n_k = 1024
        assert abs(quad - want) < 1e-3


def test_winding_rejects_short_branch():
    p = row_params(1)
    with pytest.raises(OutOfRange):
        tc.winding_number(p, np.full(16, 1.0 + 0.1j))


def test_winding_routes_random_draws():
    """Angle, quadrature, and crossing routes agree wherever all are defined.

    Seeded draw, 100 parameter sets at n_k = 512: 225 of the 400 branch
    curves certify (the rest pass too close to the origin), and the three
    routes give the same integer on every certified curve.
    """
    rng = np.random.default_rng(5)
    defined = 0
    excluded = 0
    for _ in range(100):
        r1, r2, c1, c2, l = rng.uniform(0.05, 2.0, size=5)
        p = tc.CircuitParams(r1, r2, c1, c2, l, n_cells=2)
        band = tc.band_trace(p, 512)
        for lab, br in band.branches.items():
            try:
                wa = tc.winding_number(p, br, band.k_grid)
            except OriginCrossing:
                excluded += 1
                continue
            assert winding_crossings(p, br, band.k_grid) == wa
            assert round(tc.winding_quadrature(p, br, band.k_grid)) == wa
            defined += 1
    assert defined == 225
    assert excluded == 175


def test_skin_winding_trajectory_and_base_point(band_row3):
    p = row_params(3)
    omega = band_row3.branches["omega4"][100]
    res = tc.skin_winding(p, omega, -1.4 - 0.012j, band=band_row3)
    assert res.winding == -1
    assert res.base_point == -1.4 - 0.012j
    assert len(res.trajectory) == 1024
    far = tc.skin_winding(p, omega, 300.0 + 300.0j, band=band_row3)
    assert far.winding == 0


def test_skin_winding_rejects_base_point_on_spectrum(band_row3):
    p = row_params(3)
    branch = band_row3.branches["omega4"]
    qq_point = tc.bloch_admittance(p, branch[10], band_row3.k_grid[10])
    e0 = np.sqrt(qq_point.entries[0, 1] * qq_point.entries[1, 0])
    with pytest.raises(SpectrumHit):
        tc.skin_winding(p, branch[10], complex(e0), band=band_row3)


# witness existence, frozen per row: the zone-boundary-swapped hybrid pair
# is non-reciprocal (winding -1 sliver), the m branches never are
@pytest.mark.parametrize("row", list(ROWS))
def test_skin_effect_presence_pattern(row, bands_all_rows):
    p = row_params(row)
    band = bands_all_rows[row]
    for lab in ("omega3", "omega6"):
        present, witness = tc.skin_effect_present(
            p, band.branches[lab][0], band=band)
        assert not present and witness is None
    for lab in ("omega4", "omega5"):
        present, witness = tc.skin_effect_present(
            p, band.branches[lab][0], band=band)
        assert present
        res = tc.skin_winding(p, band.branches[lab][0], witness, band=band)
        assert res.winding != 0


def test_row4_witness_needs_sheet_midpoints(band_row4):
    """The row-4 non-reciprocal sliver is ~4e-4 wide; the raster alone
    misses it and the locus-reflection midpoint pass finds it."""
    p = row_params(4)
    present, witness = tc.skin_effect_present(
        p, band_row4.branches["omega4"][0], band=band_row4)
    assert present
    assert abs(witness) < 0.5  # tiny base point inside the sliver


def test_classify_requires_open_and_gapped():
    p = row_params(1, n_cells=6, boundary=tc.Boundary.PERIODIC)
    m = tc.real_space_matrix(p, 1.0 + 0.5j)
    spec = tc.eigendecompose(m)
    with pytest.raises(GapUnknown):
        tc.classify_states(spec, 1.0)
    p_open = row_params(1, n_cells=6)
    spec_open = tc.eigendecompose(tc.real_space_matrix(p_open, 1.0 + 0.5j))
    with pytest.raises(GapUnknown):
        tc.classify_states(spec_open, 0.0)


def test_classification_counts_row4(chain300):
    for lab in ("omega3", "omega6"):
        spec, gap, _ = chain300[lab]
        counts = {t: spec.labels.count(t) for t in ("Edge", "Skin", "Bulk")}
        assert counts == {"Edge": 2, "Skin": 0, "Bulk": 598}
    for lab in ("omega4", "omega5"):
        spec, gap, _ = chain300[lab]
        counts = {t: spec.labels.count(t) for t in ("Edge", "Skin", "Bulk")}
        assert counts == {"Edge": 2, "Skin": 2, "Bulk": 596}


def test_edge_states_are_zero_modes_row4(chain300):
    spec, gap, _ = chain300["omega6"]
    idx = [i for i, t in enumerate(spec.labels) if t == "Edge"]
    assert len(idx) == 2
    for i in idx:
        assert abs(spec.eigenvalues[i]) < 1e-10
        assert spec.ipr[i] == pytest.approx(0.5, abs=1e-3)


def test_center_of_mass_shift_row4(chain300):
    com = {lab: tc.center_of_mass_shift(chain300[lab][0])
           for lab in chain300}
    assert abs(com["omega3"]) < 0.1
    assert abs(com["omega6"]) < 0.1
    assert com["omega4"] == pytest.approx(-4.556079, abs=1e-3)
    assert com["omega5"] == pytest.approx(-4.556079, abs=1e-3)


def test_perturb_chain_locality():
    p = row_params(1, n_cells=8)
    m = tc.real_space_matrix(p, 1.0 + 0.5j)
    out = tc.perturb_chain(m, (3,), 0.1)
    diff = out.entries != m.entries
    changed = set(zip(*np.nonzero(diff)))
    assert changed == {(6, 7), (7, 6), (7, 8), (8, 7)}
    assert out.entries[6, 7] == pytest.approx(m.entries[6, 7] * 1.1)


def test_perturb_chain_bounds():
    p = row_params(1, n_cells=8)
    m = tc.real_space_matrix(p, 1.0 + 0.5j)
    with pytest.raises(OutOfRange):
        tc.perturb_chain(m, (3,), 0.5)
    with pytest.raises(OutOfRange):
        tc.perturb_chain(m, (9,), 0.1)


def test_compare_perturbed_identity():
    p = row_params(4, n_cells=40)
    band = tc.band_trace(p, 128)
    entries = tc.branch_effective_matrix(p, band, "omega6")
    m = tc.RealSpaceMatrix(entries=entries, params=p, omega=1.0)
    gap = tc.bulk_gap(p, band.branches["omega6"])
    spec = tc.classify_states(tc.eigendecompose(m), gap)
    rep = tc.compare_perturbed(spec, tc.eigendecompose(m), gap)
    assert rep.edge_state_drift == 0.0
    assert rep.bulk_state_drift == 0.0
    assert rep.max_eigenvalue_shift == 0.0
    assert all(i == j for i, j in rep.matched_pairs)


def test_compare_perturbed_frozen_drifts(chain300):
    spec, gap, matrix = chain300["omega6"]
    pert = tc.perturb_chain(matrix, (149, 150, 151), 0.05)
    rep = tc.compare_perturbed(spec, tc.eigendecompose(pert), gap)
    assert rep.edge_state_drift == pytest.approx(0.001917760293, rel=1e-6)
    assert rep.skin_state_drift == 0.0
    assert rep.bulk_state_drift == pytest.approx(1.411329684702, rel=1e-6)
    assert rep.max_eigenvalue_shift == pytest.approx(0.091822851192, rel=1e-6)
