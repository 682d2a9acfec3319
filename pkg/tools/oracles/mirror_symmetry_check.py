"""Numerical witness that the root set is closed under omega -> -conj(omega).

The coefficient vector satisfies c_j conj = (-1)^j c_j (even coefficients
real, odd ones imaginary), which forces roots into mirror pairs straddling
the imaginary axis.  Mirror pairs project onto identical admittance-plane
curves, so the four tracked branches can only produce winding multisets
that pair up.  Verified here over random parameter draws: the reflected set
matches the root set to solver precision in every draw.
"""

import numpy as np

from topochain import CircuitParams, natural_frequencies

rng = np.random.default_rng(11)
worst = 0.0
for _ in range(2000):
    r1, r2, c1, c2, l = rng.uniform(0.02, 2.0, size=5)
    k = rng.uniform(0.05, 2.0 * np.pi - 0.05)
    p = CircuitParams(r1, r2, c1, c2, l, n_cells=2)
    roots = natural_frequencies(p, k).roots
    mirrored = -np.conj(roots)
    for z in mirrored:
        worst = max(worst, np.abs(roots - z).min() / max(1.0, abs(z)))

print(f"worst mirror-pair mismatch over 2000 draws: {worst:.3e}")
