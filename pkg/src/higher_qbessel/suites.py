"""Identity checks behind ``higher-qbessel verify``.

Each suite returns :class:`Check` records: the largest deviation seen over
a small grid and the threshold it is held to.  Suites use the configured
``q``, ``r`` and ``alpha``; where an identity only holds for particular
``delta`` the suite fixes it and says so in the check name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .qbessel import BesselSpec, SonineShift, apply_B, apply_B2, b_rn_alpha, j_alpha, mehler_j, sonine_j
from .qcalc import LatticeFunction, jackson_0_a, q_derivative_n
from .qcore import (
    AlphaVector,
    QBase,
    alpha_norm,
    q_beta,
    q_binomial_coeff,
    q_factorial,
    q_gamma,
    q_number,
    q_pochhammer,
    q_rising,
)
from .qharmonic import convolve0, fourier0, translate_T_alpha, translate_tau
from .qheat import (
    HeatPolySpec,
    bound_lemma13,
    bound_lemma14,
    heat_gen_coefficients,
    heat_poly,
    heat_residual,
    kernel_K,
)
from .qspecial import b_rm, cos_product, cos_r, dq_cos_r

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_dev <= self.tol)


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(b), 1e-300)


def _worst(devs) -> float:
    return max(devs, default=0.0)


def _spec(q: float, r: int, delta: float, alpha) -> BesselSpec:
    return BesselSpec(QBase(q, r, delta), AlphaVector(tuple(alpha)))


# --- suites -----------------------------------------------------------------------------


def suite_gamma(q, r, delta, alpha):
    devs = []
    for t in (0.5, 1.0, 1.5, 2.0):
        for s in (0.5, 1.0, 1.5, 2.0):
            f = lambda x, t=t, s=s: np.asarray(x) ** (t - 1) * q_pochhammer_vec(np.asarray(x) * q, q, s - 1)  # noqa: E731
            devs.append(_rel(jackson_0_a(LatticeFunction(f, q=q), 1.0, q).value, q_beta(t, s, q)))
    fe = [_rel(q_gamma(t + 1, q), q_number(t, q) * q_gamma(t, q)) for t in (0.3, 0.7, 1.2, 2.5)]
    return [Check("Beta: Jackson integral vs Gamma ratio", _worst(devs), 1e-10),
            Check("Gamma_q(t+1) = (t)_q Gamma_q(t)", _worst(fe), 1e-12)]


def q_pochhammer_vec(x, q: float, e: float):
    """``(x; q)_inf / (x q^e; q)_inf`` for ``0 <= x <= 1`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    num = np.ones_like(x)
    den = np.ones_like(x)
    a, b = x.copy(), x * q**e
    for _ in range(4000):
        if np.all(np.abs(a) < 1e-18) and np.all(np.abs(b) < 1e-18):
            break
        num *= 1 - a
        den *= 1 - b
        a, b = a * q, b * q
    return num / den


def suite_duplication(q, r, delta, alpha):
    devs, comp = [], []
    for rr in (2, 3, 4):
        Q = q**rr
        for n in range(11):
            lhs = math.prod(q_gamma(n + i / rr, Q) for i in range(1, rr)) / q_factorial(rr * n, q)
            rhs = (math.prod(q_gamma(i / rr, Q) for i in range(1, rr))
                   / (q_factorial(n, Q) * q_number(rr, q) ** (rr * n)))
            devs.append(_rel(lhs, rhs))
            c = q_number(rr, q) ** (rr * n) * q_rising(1, n, Q) * math.prod(q_rising(i / rr, n, Q) for i in range(1, rr))
            comp.append(_rel(c, q_factorial(rr * n, q)))
    return [Check("duplication formula, r in {2,3,4}, n <= 10", _worst(devs), 1e-10),
            Check("(r)^(rn) (1)_n prod (i/r)_n = [rn]!", _worst(comp), 1e-10)]


def suite_binomial(q, r, delta, alpha):
    devs, alt = [], []
    vals = (0.25, 0.5, -0.5)
    for n in range(9):
        for a in vals:
            for b in vals:
                lhs = q_pochhammer(a * b, q, n)
                rhs = math.fsum(q_binomial_coeff(n, k, q) * b**k * q_pochhammer(a, q, k) * q_pochhammer(b, q, n - k)
                                for k in range(n + 1))
                devs.append(abs(lhs - rhs))
        for k in range(n + 1):
            lhs = q_rising(1, n, q) / q_rising(1, n - k, q)
            rhs = (-1) ** k * q_rising(-n, k, q) * q ** (n * k - k * (k - 1) / 2)
            alt.append(_rel(lhs, rhs))
    return [Check("q-binomial formula", _worst(devs), 1e-12),
            Check("(1)_n/(1)_(n-k) sign alternation", _worst(alt), 1e-10)]


def suite_trig(q, r, delta, alpha):
    base = QBase(q, r, delta)
    devs, chain = [], []
    for lam in (q * q, q, 1.0):
        for k in range(-1, 4):
            x = q**k
            f = lambda s, lam=lam: cos_r(lam * np.asarray(s), base)  # noqa: E731
            lhs = q_derivative_n(f, q ** (-delta) * x, q, r)
            rhs = -(lam**r) * cos_r(lam * x, base)
            devs.append(abs(lhs - rhs) / max(1.0, abs(rhs)))
    for l in range(1, r + 1):
        for x in (q, 0.5, 1.0):
            f = lambda s: cos_r(np.asarray(s), base)  # noqa: E731
            chain.append(abs(dq_cos_r(x, l, base) - q_derivative_n(f, x, q, l)))
    return [Check(f"Lambda^-1 D^r cos_r = -lambda^r cos_r (delta={delta:g})", _worst(devs), 1e-8),
            Check("D_q^l cos_r closed form vs difference quotient", _worst(chain), 1e-8)]


def suite_product(q, r, delta, alpha):
    base = QBase(q, r, 1.0)
    pts = (q * q, q, 1.0)
    devs = [_rel(cos_product(x, y, base), cos_r(x, base) * cos_r(y, base)) for x in pts for y in pts]
    return [Check("product formula (delta=1)", _worst(devs), 1e-8)]


def suite_bessel_eigen(q, r, delta, alpha):
    out = []
    for d in sorted({float(delta), 1.0, float(r)}):
        spec = _spec(q, r, d, alpha)
        devs = []
        for lam in (q, 1.0):
            f = lambda s, lam=lam: j_alpha(spec, lam * np.asarray(s))  # noqa: E731
            for k in range(4):
                x = q**k
                rhs = -(lam**r) * j_alpha(spec, lam * x)
                devs.append(abs(apply_B(spec, f, x) - rhs) / max(1.0, abs(rhs)))
        out.append(Check(f"B j_alpha(lambda .) = -lambda^r j_alpha (delta={d:g})", _worst(devs), 1e-8))
    spec = _spec(q, r, delta, alpha)
    poly = lambda s: 1 + np.asarray(s) ** 2 - 0.5 * np.asarray(s) ** 5 + np.asarray(s) ** 7  # noqa: E731
    if r == 2:
        devs = [abs(apply_B(spec, poly, x) - apply_B2(spec, poly, x)) for x in (q, 0.7, 1.0)]
        out.append(Check("generic B vs r=2 closed form", _worst(devs), 1e-12))
    devs = [_rel(apply_B(spec, poly, x, method="stencil"), apply_B(spec, poly, x)) for x in (q, 0.7, 1.0)]
    out.append(Check("B composed vs stencil", _worst(devs), 1e-12))
    return out


def _strict_alpha(r, alpha):
    a = AlphaVector(tuple(alpha))
    try:
        a.check_strict()
        return tuple(alpha)
    except ValueError:
        return tuple(0.0 for _ in range(r - 1))


def suite_mehler(q, r, delta, alpha):
    spec = _spec(q, r, delta, _strict_alpha(r, alpha))
    devs = [_rel(mehler_j(spec, z), j_alpha(spec, z)) for z in (0.25, 0.5, 1.0)]
    return [Check("Mehler integral vs series", _worst(devs), 1e-8)]


def suite_sonine(q, r, delta, alpha):
    spec = _spec(q, r, delta, _strict_alpha(r, alpha))
    devs = []
    for p in (1.0, 1.5):
        sh = SonineShift(tuple(p for _ in range(r - 1)))
        target = spec.shifted(list(sh.p))
        devs += [_rel(sonine_j(spec, sh, z), j_alpha(target, z)) for z in (0.25, 0.5, 1.0)]
    return [Check("Sonine integral vs shifted series", _worst(devs), 1e-8)]


def suite_translation(q, r, delta, alpha):
    base = QBase(q, r, delta)
    spec = _spec(q, r, delta, alpha)
    pts = [q**k for k in range(4)]
    tau, T = [], []
    for lam in (q, 1.0):
        c = LatticeFunction(lambda s, lam=lam: cos_r(lam * np.asarray(s), base), parity="r-even", q=q)
        j = LatticeFunction(lambda s, lam=lam: j_alpha(spec, lam * np.asarray(s)), parity="r-even", q=q)
        for x in pts:
            for y in pts:
                tau.append(abs(translate_tau(base, c, x, y) - cos_r(lam * x, base) * cos_r(lam * y, base)))
                T.append(abs(translate_T_alpha(spec, j, x, y) - j_alpha(spec, lam * x) * j_alpha(spec, lam * y)))
    return [Check(f"tau_x cos_r(lambda .)(y) = cos_r(lambda x) cos_r(lambda y) (delta={delta:g})", _worst(tau), 1e-7),
            Check(f"T_x j(lambda .)(y) = j(lambda x) j(lambda y) (delta={delta:g})", _worst(T), 1e-7)]


def suite_convolution(q, r, delta, alpha):
    base = QBase(q, 2, 1.0)
    f = LatticeFunction.from_atoms({0: 1.0, 1: -0.5, 3: 0.25}, q)
    g = LatticeFunction.from_atoms({-1: 0.3, 2: 1.0}, q)
    h = LatticeFunction(lambda x: np.array([convolve0(base, f, g, float(v)) for v in np.atleast_1d(x)]).reshape(np.shape(x)), q=q)
    devs = []
    for lam in (q * q, q, 1.0):
        lhs = fourier0(base, h, lam).value
        rhs = fourier0(base, f, lam).value * fourier0(base, g, lam).value
        devs.append(abs(lhs - rhs))
    return [Check("F_0(f*g) = F_0(f) F_0(g) (r=2, delta=1)", _worst(devs), 1e-6)]


def _heat_specs(q, r, delta, alpha):
    return [HeatPolySpec(_spec(q, r, d, alpha), 1) for d in sorted({max(float(delta), 1.0), float(r)})]


def suite_heatpoly(q, r, delta, alpha):
    forms, res = [], []
    for h in _heat_specs(q, r, delta, alpha):
        for n in range(9):
            for x in (q, 1.0):
                for t in (q**r, 1.0):
                    forms.append(_rel(heat_poly(h, n, x, t, method="phi"), heat_poly(h, n, x, t)))
                    R, scale = heat_residual(h, lambda a, b, n=n, h=h: float(heat_poly(h, n, a, b)), x, t)
                    res.append(abs(R) / scale)
    return [Check("heat polynomial: finite sum vs 1phi form", _worst(forms), 1e-10),
            Check("B p_n = D_(Q,t) p_n", _worst(res), 1e-8)]


def suite_genfunc(q, r, delta, alpha):
    devs = []
    for h in _heat_specs(q, r, delta, alpha):
        for x, t in ((0.4, 0.4), (1.0, 0.5)):
            c = heat_gen_coefficients(h, x, t, 10)
            ref = [(-1) ** n * heat_poly(h, n, x, t) / h.norm(n) for n in range(11)]
            devs.append(float(np.max(np.abs(c - np.array(ref)))))
    return [Check("generating function coefficients through z^(10r)", _worst(devs), 1e-9)]


def suite_kernel(q, r, delta, alpha):
    out = []
    for d in sorted({2.0, float(r)} | ({float(delta)} if delta > 1 else set())):
        h = HeatPolySpec(_spec(q, r, d, alpha), 1)
        devs, res = [], []
        for t in (1.0, q**r):
            for x in (0.0, q, 1.0):
                devs.append(_rel(kernel_K(h, x, t), kernel_K(h, x, t, method="integral")))
            for x in (q, 1.0):
                R, scale = heat_residual(h, lambda a, b, h=h: kernel_K(h, a, b), x, t)
                res.append(abs(R) / scale)
        out.append(Check(f"kernel closed form vs integral (delta={d:g}, t in Q^Z)", _worst(devs), 1e-7))
        out.append(Check(f"kernel heat residual (delta={d:g})", _worst(res), 1e-5))
    return out


def suite_bounds(q, r, delta, alpha):
    slack13, dev14, low14, c0, c12 = [], [], [], [], []
    for d in (1.0, 2.0):
        h = HeatPolySpec(_spec(q, r, d, alpha), 1)
        base = h.base
        for n in range(11):
            for x in (0.0, 0.3, 1.0):
                for t in (0.1, 0.5, 2.0):
                    for s in (0.5, 1.0, 2.0):
                        L, R = bound_lemma13(h, n, x, t, s)
                        slack13.append((L - R) / R)
                    L, R = bound_lemma14(h, n, x, t)
                    (dev14 if x == 0 else low14).append((L - R) / R if x else abs(L - R) / R)
        b1 = QBase(q, r, 1.0)
        for n in range(13):
            for x in (0.5, 1.0, 2.0):
                bd, bone = abs(b_rm(n, x, base)), abs(b_rm(n, x, b1))
                c0.append(max(bd - bone, bone - q ** (-r * (r - 1) / 2) * x ** (r * n) / math.factorial(r * n)) / bone)
            c12.append((b_rn_alpha(h.spec, n, 1.0) - b_rn_alpha(BesselSpec(b1, h.spec.alpha), n, 1.0))
                       / b_rn_alpha(BesselSpec(b1, h.spec.alpha), n, 1.0))
    return [Check("p_n/alpha_rn <= s^n/[n]! (1+|t|/s)^n R(|x|/s^(1/r))", max(0.0, _worst(slack13)), 1e-10),
            Check("p_n(0,t) = alpha_rn t^n/[n]!", _worst(dev14), 1e-12),
            Check("p_n(x,t) >= alpha_rn t^n/[n]!", max(0.0, -min(low14)), 1e-12),
            Check("|b_rn(delta)| <= |b_rn(1)| <= q^-C(r,2) x^rn/(rn)!", max(0.0, _worst(c0)), 1e-12),
            Check("b_rn,alpha(1; delta) <= b_rn,alpha(1; 1)", max(0.0, _worst(c12)), 1e-12)]


SUITES: dict[str, Callable] = {
    "gamma": suite_gamma,
    "duplication": suite_duplication,
    "binomial": suite_binomial,
    "trig": suite_trig,
    "product": suite_product,
    "bessel-eigen": suite_bessel_eigen,
    "mehler": suite_mehler,
    "sonine": suite_sonine,
    "translation": suite_translation,
    "convolution": suite_convolution,
    "heatpoly": suite_heatpoly,
    "genfunc": suite_genfunc,
    "kernel": suite_kernel,
    "bounds": suite_bounds,
}


def run_suite(name: str, q: float, r: int, delta: float, alpha, tol: Optional[float] = None) -> list[Check]:
    """Run one suite (or ``"all"``); ``tol`` replaces every threshold when given."""
    names = list(SUITES) if name == "all" else [name]
    out = []
    for nm in names:
        for c in SUITES[nm](q, r, delta, tuple(alpha)):
            out.append(Check(f"{nm}: {c.name}", c.max_dev, c.tol if tol is None else tol))
    return out
