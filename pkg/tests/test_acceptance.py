"""The thirteen acceptance criteria, each at its stated grid and tolerance.

Every test records one PASS/FAIL line (printed with ``-s`` and collected in
the terminal summary) before asserting.
"""

import math

import numpy as np
import pytest

from higher_qbessel import (
    AlphaVector,
    BesselSpec,
    HeatPolySpec,
    LatticeFunction,
    QBase,
    SonineShift,
    apply_B,
    apply_B2,
    apply_B3,
    b_rm,
    b_rn_alpha,
    bound_lemma13,
    bound_lemma14,
    convolve0,
    cos_product,
    cos_r,
    dq_cos_r,
    fourier0,
    heat_gen_coefficients,
    heat_poly,
    heat_residual,
    jackson_0_a,
    j_alpha,
    kernel_K,
    mehler_j,
    q_beta,
    q_derivative_n,
    q_factorial,
    q_gamma,
    q_number,
    q_rising,
    sin_rl,
    solve_heat,
    sonine_j,
    translate_T_alpha,
    translate_tau,
)


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def spec(q, r, delta, alpha=None):
    return BesselSpec(QBase(q, r, delta), AlphaVector(tuple(alpha if alpha is not None else [0.0] * (r - 1))))


def poch_ratio(x, q, e):
    """(x;q)_inf / (x q^e;q)_inf by direct product."""
    num = den = 1.0
    a, b = x, x * q**e
    while abs(a) > 1e-18 or abs(b) > 1e-18:
        num *= 1 - a
        den *= 1 - b
        a, b = a * q, b * q
    return num / den


def test_criterion_01_beta_integral(acceptance):
    worst = 0.0
    for q in (0.3, 0.5, 0.9):
        for t in (0.5, 1.0, 1.5, 2.0):
            for s in (0.5, 1.0, 1.5, 2.0):
                f = LatticeFunction(
                    lambda x, t=t, s=s, q=q: np.vectorize(lambda v: v ** (t - 1) * poch_ratio(v * q, q, s - 1))(x), q=q)
                worst = max(worst, rel(jackson_0_a(f, 1.0, q).value, q_beta(t, s, q)))
    acceptance(1, worst <= 1e-10, f"Jackson Beta vs Gamma ratio, max rel {worst:.2e} (tol 1e-10)")
    assert worst <= 1e-10


def test_criterion_02_duplication(acceptance):
    worst = 0.0
    for q in (0.5, 0.9):
        for r in (2, 3, 4):
            Q = q**r
            for n in range(11):
                lhs = math.prod(q_gamma(n + i / r, Q) for i in range(1, r)) / q_factorial(r * n, q)
                rhs = math.prod(q_gamma(i / r, Q) for i in range(1, r)) / (q_factorial(n, Q) * q_number(r, q) ** (r * n))
                worst = max(worst, rel(lhs, rhs))
    acceptance(2, worst <= 1e-10, f"duplication formula, max rel {worst:.2e} (tol 1e-10)")
    assert worst <= 1e-10


def test_criterion_03_trig_system(acceptance):
    q = 0.5
    eig = chain = 0.0
    for r in (2, 3):
        for delta in (1.0, 2.0):
            base = QBase(q, r, delta)
            for lam in (q * q, q, 1.0):
                f = lambda s, lam=lam: cos_r(lam * np.asarray(s), base)  # noqa: E731
                for k in range(-1, 4):
                    x = q**k
                    lhs = q_derivative_n(f, q ** (-delta) * x, q, r)
                    rhs = -(lam**r) * cos_r(lam * x, base)
                    eig = max(eig, abs(lhs - rhs) / max(1.0, abs(rhs)))
            for x in (q, 0.5, 1.0):
                c = lambda s: cos_r(np.asarray(s), base)  # noqa: E731
                for l in range(1, r + 1):
                    chain = max(chain, abs(dq_cos_r(x, l, base) - q_derivative_n(c, x, q, l)))
                for m in range(1, r):
                    sm = lambda s, m=m: sin_rl(np.asarray(s), m, base)  # noqa: E731
                    for l in range(m, r):
                        chain = max(chain, abs(q_derivative_n(sm, x, q, l - m) - sin_rl(x, l, base)))
                    chain = max(chain, abs(q_derivative_n(sm, x, q, r - m) - cos_r(x, base)))
    ok = eig <= 1e-8 and chain <= 1e-8
    acceptance(3, ok, f"eigen residual {eig:.2e}, derivative chain {chain:.2e} (tol 1e-8)")
    assert ok


def test_criterion_04_product_formula(acceptance):
    q = 0.5
    worst = 0.0
    for r in (2, 3):
        base = QBase(q, r, 1.0)
        pts = (q * q, q, 1.0)
        for x in pts:
            for y in pts:
                worst = max(worst, rel(cos_product(x, y, base), cos_r(x, base) * cos_r(y, base)))
    acceptance(4, worst <= 1e-8, f"product formula, max rel {worst:.2e} (tol 1e-8)")
    assert worst <= 1e-8


def test_criterion_05_bessel_eigen(acceptance):
    q = 0.5
    res = closed = 0.0
    for r in (2, 3):
        for delta in (1.0, float(r)):
            sp = spec(q, r, delta, [0.25 * i for i in range(1, r)])
            for lam in (q, 1.0):
                f = lambda s, lam=lam, sp=sp: j_alpha(sp, lam * np.asarray(s))  # noqa: E731
                for k in range(4):
                    x = q**k
                    rhs = -(lam**r) * j_alpha(sp, lam * x)
                    res = max(res, abs(apply_B(sp, f, x) - rhs) / max(1.0, abs(rhs)))
    polys = [lambda s: 1 + np.asarray(s) ** 2 - 0.5 * np.asarray(s) ** 5 + np.asarray(s) ** 7,
             lambda s: np.asarray(s) ** 3 - 2 * np.asarray(s) ** 6]
    for delta in (1.0, 2.0):
        for a in (0.0, 0.7):
            s2 = spec(q, 2, delta, [a])
            for nu in (0.0, 0.5):
                s3 = spec(q, 3, delta, [-2.0 / 3.0, nu - 1.0 / 3.0])
                for p in polys:
                    for x in (q, 0.7, 1.0):
                        closed = max(closed, abs(apply_B(s2, p, x) - apply_B2(s2, p, x)) / max(1.0, abs(apply_B(s2, p, x))),
                                     abs(apply_B(s3, p, x) - apply_B3(s3, p, x)) / max(1.0, abs(apply_B(s3, p, x))))
    ok = res <= 1e-8 and closed <= 1e-12
    acceptance(5, ok, f"B j = -lambda^r j residual {res:.2e} (1e-8); r=2/3 closed forms {closed:.2e} (1e-12)")
    assert ok


def test_criterion_06_mehler_sonine(acceptance):
    m = s = 0.0
    for q in (0.5, 0.8):
        for r in (2, 3):
            sp = spec(q, r, 1.0)
            for z in (0.25, 0.5, 1.0):
                m = max(m, rel(mehler_j(sp, z), j_alpha(sp, z)))
                for p in (1.0, 1.5):
                    sh = SonineShift(tuple(p for _ in range(r - 1)))
                    s = max(s, rel(sonine_j(sp, sh, z), j_alpha(sp.shifted(list(sh.p)), z)))
    ok = m <= 1e-8 and s <= 1e-8
    acceptance(6, ok, f"Mehler {m:.2e}, Sonine {s:.2e} (rel tol 1e-8)")
    assert ok


def test_criterion_07_collapse(acceptance):
    worst = 0.0
    xs = [0.0] + [0.5**k for k in range(-2, 6)] + [3.0]
    for q in (0.3, 0.5, 0.8):
        for r in (2, 3, 4):
            for delta in (1.0, 2.0):
                base = QBase(q, r, delta)
                sp = BesselSpec.collapse(base)
                for x in xs:
                    a, b = j_alpha(sp, x), cos_r(x, base)
                    worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    acceptance(7, worst <= 1e-12, f"j at collapsed alpha vs cos_r, max dev {worst:.2e} (tol 1e-12)")
    assert worst <= 1e-12


def test_criterion_08_multiplication(acceptance):
    q = 0.5
    tau = T = 0.0
    for r in (2, 3):
        for delta in (1.0, 2.0):
            base = QBase(q, r, delta)
            sp = spec(q, r, delta, [0.5] * (r - 1))
            pts = [q**k for k in range(4)]
            for lam in (q, 1.0):
                c = LatticeFunction(lambda s, lam=lam: cos_r(lam * np.asarray(s), base), parity="r-even", q=q)
                j = LatticeFunction(lambda s, lam=lam: j_alpha(sp, lam * np.asarray(s)), parity="r-even", q=q)
                for x in pts:
                    for y in pts:
                        tau = max(tau, abs(translate_tau(base, c, x, y) - cos_r(lam * x, base) * cos_r(lam * y, base)))
                        T = max(T, abs(translate_T_alpha(sp, j, x, y) - j_alpha(sp, lam * x) * j_alpha(sp, lam * y)))
    ok = tau <= 1e-7 and T <= 1e-7
    acceptance(8, ok, f"tau/cos_r {tau:.2e}, T^alpha/j_alpha {T:.2e} (tol 1e-7)")
    assert ok


def test_criterion_09_convolution(acceptance):
    q = 0.5
    base = QBase(q, 2, 1.0)
    pairs = [({0: 1.0}, {0: 1.0}),
             ({0: 1.0, 1: -0.5, 3: 0.25}, {-1: 0.3, 2: 1.0}),
             ({-2: 0.1, 0: 2.0, 2: -1.0}, {1: 1.0, 4: 0.5})]
    worst = 0.0
    for fa, ga in pairs:
        f, g = LatticeFunction.from_atoms(fa, q), LatticeFunction.from_atoms(ga, q)
        h = LatticeFunction(lambda x: np.vectorize(lambda v: convolve0(base, f, g, float(v)))(x), q=q)
        for lam in (q * q, q, 1.0, 2.0):
            lhs = fourier0(base, h, lam).value
            rhs = fourier0(base, f, lam).value * fourier0(base, g, lam).value
            worst = max(worst, abs(lhs - rhs))
    acceptance(9, worst <= 1e-6, f"F(f*g) = F(f) F(g) at r=2, delta=1, max dev {worst:.2e} (tol 1e-6)")
    assert worst <= 1e-6


def test_criterion_10_heat_polynomials(acceptance):
    q = 0.5
    forms = res = gen = 0.0
    for r in (2, 3):
        for delta in (1.0, 2.0):
            h = HeatPolySpec(spec(q, r, delta, [0.3] * (r - 1)), 1)
            for n in range(9):
                for x in (q, 1.0):
                    for t in (q**r, 0.7, 1.0):
                        forms = max(forms, rel(heat_poly(h, n, x, t, method="phi"), heat_poly(h, n, x, t)))
                        R, scale = heat_residual(h, lambda a, b, n=n: float(heat_poly(h, n, a, b)), x, t)
                        res = max(res, abs(R) / scale)
            for x, t in ((0.4, 0.4), (1.0, 0.5), (0.8, 2.0)):
                c = heat_gen_coefficients(h, x, t, 10)
                ref = np.array([(-1) ** n * heat_poly(h, n, x, t) / h.norm(n) for n in range(11)])
                gen = max(gen, float(np.max(np.abs(c - ref))))
    ok = forms <= 1e-10 and res <= 1e-8 and gen <= 1e-9
    acceptance(10, ok, f"forms {forms:.2e} (1e-10), heat residual {res:.2e} (1e-8), gen. coeffs {gen:.2e} (1e-9)")
    assert ok


def test_criterion_11_kernel_and_solver(acceptance):
    q = 0.5
    eq = kres = sres = 0.0
    for r in (2, 3):
        Q = q**r
        for delta in sorted({2.0, float(r)}):
            h = HeatPolySpec(spec(q, r, delta), 1)
            for t in (1.0, Q, 1 / Q):
                for x in (0.0, q, 1.0):
                    eq = max(eq, rel(kernel_K(h, x, t), kernel_K(h, x, t, method="integral")))
            for t in (0.7, 1.0):
                for x in (q, 1.0):
                    R, scale = heat_residual(h, lambda a, b: kernel_K(h, a, b), x, t)
                    kres = max(kres, abs(R) / scale)
        h = HeatPolySpec(spec(q, r, 3.0), 1)
        data = [LatticeFunction.from_atoms({0: 1.0}, q),
                LatticeFunction.from_atoms({0: 1.0, 1: -0.5, 2: 0.25}, q),
                LatticeFunction(lambda y: np.exp(-np.asarray(y) ** 2), window=(-2, 25), q=q)]
        for f in data:
            u = lambda a, b, f=f: solve_heat(h, f, a, b)  # noqa: E731
            for x in (0.25, 1.0):
                for t in (0.5, 1.0):
                    R, scale = heat_residual(h, u, x, t)
                    sres = max(sres, abs(R) / scale)
    ok = eq <= 1e-7 and kres <= 1e-5 and sres <= 1e-5
    acceptance(11, ok, f"K series vs integral {eq:.2e} (1e-7, t in Q^Z), kernel residual {kres:.2e} (1e-5), "
                       f"solve_heat residual {sres:.2e} (1e-5, delta=3)")
    assert ok


def test_criterion_12_bounds(acceptance):
    q = 0.5
    slack = eq14 = coef = 0.0
    for r in (2, 3):
        b1 = QBase(q, r, 1.0)
        for delta in (1.0, 2.0):
            h = HeatPolySpec(spec(q, r, delta, [0.5] * (r - 1)), 1)
            for n in range(11):
                for t in (0.1, 0.5, 2.0):
                    for x in (0.0, 0.3, 1.0):
                        for s in (0.5, 1.0, 2.0):
                            L, R = bound_lemma13(h, n, x, t, s)
                            slack = max(slack, (L - R) / R)
                    L, R = bound_lemma14(h, n, 0.0, t)
                    eq14 = max(eq14, abs(L - R) / R)
            for n in range(13):
                for x in (0.5, 1.0, 2.0):
                    bd, bone = abs(b_rm(n, x, h.base)), abs(b_rm(n, x, b1))
                    top = q ** (-r * (r - 1) / 2) * x ** (r * n) / math.factorial(r * n)
                    coef = max(coef, (bd - bone) / bone, (bone - top) / top)
                one = b_rn_alpha(BesselSpec(b1, h.spec.alpha), n, 1.0)
                coef = max(coef, (b_rn_alpha(h.spec, n, 1.0) - one) / one)
    ok = slack <= 1e-10 and eq14 <= 1e-12 and coef <= 1e-12
    acceptance(12, ok, f"heat majorant excess {max(slack, 0):.2e} (1e-10 rhs), p_n(0,t) equality {eq14:.2e}, "
                       f"coefficient bounds excess {max(coef, 0):.2e}")
    assert ok


def test_criterion_13_classical_limit(acceptance):
    sp = spec(0.999, 2, 1.0, [0.0])
    worst = 0.0
    for x in (0.5, 1.0):
        sv = j_alpha(sp, x, full=True)
        classical = math.fsum((-1) ** m * (x / 2) ** (2 * m) / math.factorial(m) ** 2 for m in range(sv.terms))
        worst = max(worst, rel(sv.value, classical))
    acceptance(13, worst <= 0.01, f"q=0.999 vs classical Bessel series, max rel {worst:.2e} (tol 1e-2)")
    assert worst <= 0.01
