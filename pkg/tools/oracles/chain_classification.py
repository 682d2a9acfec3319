"""Frozen reference numbers for the finite-chain experiments.

Branch-effective open chains at the pinned parameter row used by the
eigenvector figure (N = 300, n_k = 1024): per-branch winding or its
origin-crossing status, bulk gap, state-label counts, center-of-mass shift,
skin-witness existence, and the drift numbers of the mid-chain perturbation
experiment on the gapped branch.  Run once, eyeballed, frozen into tests.
"""

import numpy as np

import topochain as tc
from topochain.errors import OriginCrossing
from topochain.spectral import BRANCH_LABELS

PARS = (0.05, 1.41, 0.03, 1.34, 1.17)
N = 300

p = tc.CircuitParams(*PARS, n_cells=N)
band = tc.band_trace(p, 1024)

spectra = {}
for lab in BRANCH_LABELS:
    entries = tc.branch_effective_matrix(p, band, lab)
    m = tc.RealSpaceMatrix(entries=entries, params=p,
                           omega=band.branches[lab][512])
    spec = tc.eigendecompose(m)
    gap = tc.bulk_gap(p, band.branches[lab])
    spec = tc.classify_states(spec, gap)
    spectra[lab] = (spec, gap, m)
    try:
        mu = tc.winding_number(p, band.branches[lab], band.k_grid)
    except OriginCrossing:
        mu = None
    present, witness = tc.skin_effect_present(p, band.branches[lab][0], band=band)
    counts = {t: spec.labels.count(t) for t in ("Edge", "Skin", "Bulk")}
    com = tc.center_of_mass_shift(spec)
    print(f"{lab}: mu={mu} gap={gap:.9f} counts={counts} "
          f"com={com:.6f} skin_present={present}")

spec, gap, matrix = spectra["omega6"]
center = N // 2
cells = (center - 1, center, center + 1)
pert = tc.perturb_chain(matrix, cells, 0.05)
pert_spec = tc.eigendecompose(pert)
rep = tc.compare_perturbed(spec, pert_spec, gap)
print(f"perturbation omega6 cells={cells} fraction=0.05:")
print(f"  edge_state_drift  {rep.edge_state_drift:.12f}")
print(f"  skin_state_drift  {rep.skin_state_drift:.12f}")
print(f"  bulk_state_drift  {rep.bulk_state_drift:.12f}")
print(f"  max_eig_shift     {rep.max_eigenvalue_shift:.12f}")

edge_idx = [i for i, t in enumerate(spec.labels) if t == "Edge"]
print(f"  edge eigvals      {[f'{spec.eigenvalues[i]:.3e}' for i in edge_idx]}")
print(f"  edge ipr          {[f'{spec.ipr[i]:.4f}' for i in edge_idx]}")
