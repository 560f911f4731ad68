"""
Generalized translations and the q-cosine transform
===================================================

The translation tau_x shifts a lattice function in the sense of the
r-th order q-cosine: tau_x cos_r(lam .)(y) = cos_r(lam x) cos_r(lam y).
Convolving with it and transforming gives the convolution theorem,
which holds when the translation is self-adjoint (delta = r/2).
"""

import numpy as np

from higher_qbessel import LatticeFunction, QBase, convolve0, cos_r, fourier0, translate_tau

q = 0.5
base = QBase(q, 2, 1.0)

# the multiplication formula, checked on a small lattice grid
lam = 1.0
c = LatticeFunction(lambda s: cos_r(lam * np.asarray(s), base), parity="r-even", q=q)
print("x      y      tau_x c(y) - c(x) c(y)")
for x in (1.0, q):
    for y in (1.0, q, q * q):
        gap = translate_tau(base, c, x, y) - cos_r(lam * x, base) * cos_r(lam * y, base)
        print(f"{x:<6g} {y:<6g} {gap: .2e}")

# two finitely supported functions: value a_k at the lattice point q^k
f = LatticeFunction.from_atoms({0: 1.0, 1: -0.5, 3: 0.25}, q)
g = LatticeFunction.from_atoms({-1: 0.3, 2: 1.0}, q)
h = LatticeFunction(lambda x: np.vectorize(lambda v: convolve0(base, f, g, float(v)))(x), q=q)

print("\nlam    F(f*g)               F(f) F(g)")
for lam in (0.25, 0.5, 1.0, 2.0):
    lhs = fourier0(base, h, lam).value
    rhs = fourier0(base, f, lam).value * fourier0(base, g, lam).value
    print(f"{lam:<6g} {lhs: .15f}  {rhs: .15f}")

# away from delta = r/2 the translation is no longer self-adjoint and the theorem breaks
b2 = QBase(q, 2, 2.0)
h2 = LatticeFunction(lambda x: np.vectorize(lambda v: convolve0(b2, f, g, float(v)))(x), q=q)
gap = fourier0(b2, h2, 1.0).value - fourier0(b2, f, 1.0).value * fourier0(b2, g, 1.0).value
print(f"\ndelta = 2: F(f*g) - F(f)F(g) at lam=1 is {gap:.3e}")
