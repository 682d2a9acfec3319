"""Branch winding multisets for the four pinned parameter rows.

Counts signed crossings of the positive real axis in the admittance plane,
a combinatorial route independent of the angle-accumulation and quadrature
routes packaged in the library.  Printed at two grid sizes to confirm the
multisets are converged; the values freeze the regression tests.
"""

import numpy as np

from topochain import CircuitParams, band_trace, winding_per_branch

ROWS = {
    "row1": (1.34, 0.17, 0.95, 0.45, 0.81),
    "row2": (0.03, 0.14, 1.50, 0.26, 0.57),
    "row3": (1.45, 0.14, 0.22, 0.54, 1.11),
    "row4": (0.05, 1.41, 0.03, 1.34, 1.17),
}

for name, pars in ROWS.items():
    p = CircuitParams(*pars, n_cells=2)
    for n_k in (256, 1024):
        band = band_trace(p, n_k)
        results = winding_per_branch(p, band)
        per = {r.label: (r.winding, r.quadrature) for r in results.values()}
        multiset = sorted(w for w, _ in per.values())
        quad_err = max(abs(q - w) for w, q in per.values())
        print(f"{name} n_k={n_k}: {multiset} "
              f"per-branch={ {lab: per[lab][0] for lab in sorted(per)} } "
              f"max|quad-int|={quad_err:.2e}")
