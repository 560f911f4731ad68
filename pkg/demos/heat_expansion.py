"""
Heat polynomials, the fundamental solution and expansions
=========================================================

The q-heat equation B_x u = D_{Q,t} u (Q = q^r) has polynomial solutions
p_n, a fundamental solution K, and a solver for lattice data built from the
translated kernel.  Series sum a_n p_n converge in a strip around t = 0.
"""

import math

import numpy as np

from higher_qbessel import (
    HeatPolySpec,
    LatticeFunction,
    e_q,
    expand_direct,
    expand_entire,
    heat_poly,
    heat_residual,
    j_alpha,
    kernel_K,
    solve_heat,
)

q = 0.5
h = HeatPolySpec.make(q, 2, 1.0, [0.5])
Q = h.Q

print("heat polynomials at x=0.8, t=0.5 and their heat residuals")
for n in range(5):
    p = lambda x, t, n=n: float(heat_poly(h, n, x, t))
    res, scale = heat_residual(h, p, 0.8, 0.5)
    print(f"  p_{n} = {p(0.8, 0.5): .12f}   residual/scale = {res / scale: .1e}")

# with a_n = (-1)^n z^(rn)/alpha_rn the expansion sums to e_Q(-z^r t) j_alpha(xz)
z, x, t = 0.7, 0.8, 0.5
coeffs = [(-1) ** n * z ** (2 * n) / h.norm(n) for n in range(40)]
res = expand_direct(h, coeffs, x, t)
closed = float(e_q(-(z**2) * t, Q)) * float(j_alpha(h.spec, x * z))
print(f"\nexpansion {res.value:.15f}  closed form {closed:.15f}  (observed term ratio {res.ratio:.3f})")

# cosh has coefficients 1/(2n)! in x^(2n): an entire datum of order 1 and type 1
cosh = [1.0 / math.factorial(2 * n) for n in range(30)]
state = expand_entire(h, cosh, rho=1.0, sigma=1.0)
print(f"cosh datum: strip |t| < {state.strip_radius:g}, M = {state.M:.3g}")

# the fundamental solution needs delta > 1; its series equals the defining integral for t in Q^Z
hk = HeatPolySpec.make(q, 2, 2.0, [0.5])
for t in (1.0, Q):
    print(f"\nK(0.5, {t:g}): series {kernel_K(hk, 0.5, t):.15f}  integral {kernel_K(hk, 0.5, t, method='integral'):.15f}")

# solving with lattice data: the translated kernel converges for delta > 2
hs = HeatPolySpec.make(q, 2, 3.0, [0.0])
f = LatticeFunction.from_atoms({0: 1.0, 2: -0.3}, q)
u = lambda x, t: solve_heat(hs, f, x, t)
print("\nx       u(x, 1)              residual/scale")
for x in q ** np.arange(0, 4):
    r_, s_ = heat_residual(hs, u, x, 1.0)
    print(f"{x:<7g} {u(x, 1.0): .15f}  {r_ / s_: .1e}")
