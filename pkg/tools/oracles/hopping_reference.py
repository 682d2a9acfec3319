"""High-precision reference for the Bloch hoppings and the diagonal.

Evaluates v = -C1/(1 + i w R1 C1), w2 = -C2/(1 + i w R2 C2) and
Lam = 1/(w^2 L) - C1/(1 + i w R1 C1) - C2/(1 + i w R2 C2) with 50-digit
arithmetic at a fixed operating point, then prints 17-significant-digit
literals for freezing into the unit tests.
"""

import mpmath as mp

mp.mp.dps = 50

R1, R2, C1, C2, L = map(mp.mpf, ("1.34", "0.17", "0.95", "0.45", "0.81"))
omega = mp.mpc(1, "0.5")

eta1 = 1 + 1j * omega * R1 * C1
eta2 = 1 + 1j * omega * R2 * C2
v = -C1 / eta1
w = -C2 / eta2
lam = 1 / (omega**2 * L) - C1 / eta1 - C2 / eta2


def lit(z):
    return f"{mp.nstr(z, 17, strip_zeros=False)}"


print("omega =", lit(omega))
print("v     =", lit(v))
print("w     =", lit(w))
print("lam   =", lit(lam))
