"""50-digit roots of the frequency polynomial at pinned operating points.

Builds the degree-6 coefficients with exact-decimal mpmath arithmetic
(independent of the numpy convolution path) and solves with mp.polyroots.
Prints 17-digit literals for the physical quartet after removing the two
dissipative poles; these freeze the root-finder regression tests.
"""

import mpmath as mp

mp.mp.dps = 50


def coefficients(r1, r2, c1, c2, l, k):
    one = mp.mpf(1)
    eta1 = [one, 1j * r1 * c1]
    eta2 = [one, 1j * r2 * c2]

    def conv(p, q):
        out = [mp.mpc(0)] * (len(p) + len(q) - 1)
        for i, pi in enumerate(p):
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
        return out

    def axpy(p, q, s):
        return [pi + s * qi for pi, qi in zip(p, q)]

    a = [mp.mpc(0)] * 2 + [l * c1 * e for e in eta2]
    b = [mp.mpc(0)] * 2 + [l * c2 * e for e in eta1]
    p = conv(eta1, eta2) + [mp.mpc(0)]
    p = axpy(axpy(p, a, -1), b, -1)
    out = conv(p, p)
    out = axpy(out, conv(a, a), -1)
    out = axpy(out, conv(b, b), -1)
    return axpy(out, conv(a, b), -2 * mp.cos(k))


def physical_roots(r1, r2, c1, c2, l, k):
    asc = coefficients(r1, r2, c1, c2, l, k)
    roots = mp.polyroots(asc[::-1], maxsteps=200, extraprec=100)
    poles = [1j / (r1 * c1), 1j / (r2 * c2)]
    keep = list(roots)
    for pole in poles:
        keep.remove(min(keep, key=lambda z: abs(z - pole)))
    return sorted(keep, key=lambda z: (mp.re(z), mp.im(z)))


CASES = [
    ("row2 k=pi/3", ("0.03", "0.14", "1.50", "0.26", "0.57"), mp.pi / 3),
    ("row4 k=2.1", ("0.05", "1.41", "0.03", "1.34", "1.17"), mp.mpf("2.1")),
]

for name, pars, k in CASES:
    vals = [mp.mpf(x) for x in pars]
    print(name)
    for z in physical_roots(*vals, k):
        print("   ", mp.nstr(z, 17, strip_zeros=False))
