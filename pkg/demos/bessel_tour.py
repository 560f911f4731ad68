"""
A tour of the higher-order q-Bessel function
============================================

j_alpha generalizes the normalized Bessel function to an r-th order
q-difference operator.  This script evaluates it, shows that one special
index reduces it to the q-cosine of order r, checks the eigen-equation and
compares the series with its integral representation.
"""

import numpy as np

from higher_qbessel import BesselSpec, QBase, apply_B, cos_r, j_alpha, mehler_j

q, r, delta = 0.5, 3, 1.0
spec = BesselSpec.make(q, r, delta, [0.25, 0.6])

# values on a few lattice points x = q^k, with the number of series terms used
for k in range(-1, 4):
    x = q**k
    sv = j_alpha(spec, x, full=True)
    print(f"j_alpha({x:<6g}) = {sv.value: .15f}   terms={sv.terms:2d}  tail<={sv.tail:.1e}")

# at alpha = (-1/r, ..., -(r-1)/r) the function is the q-cosine of order r
base = QBase(q, r, delta)
collapsed = BesselSpec.collapse(base)
xs = np.array([0.3, 1.0, 2.0])
print("\ncollapse index:", collapsed.alpha.alpha)
print("j - cos_r      :", j_alpha(collapsed, xs) - cos_r(xs, base))

# eigen-equation: B j_alpha(lam .) = -lam^r j_alpha(lam .)
lam = 0.8
f = lambda s: j_alpha(spec, lam * np.asarray(s))
for x in (q, 1.0):
    lhs = apply_B(spec, f, x)
    print(f"\nB j(lam x) at x={x}: {lhs:.15f}  vs  -lam^r j(lam x) = {-(lam**r) * j_alpha(spec, lam * x):.15f}")

# the Mehler-type integral over [0,1]^(r-1) reproduces the series
for z in (0.25, 1.0):
    print(f"Mehler integral at z={z}: {mehler_j(spec, z):.15f}   series: {j_alpha(spec, z):.15f}")
