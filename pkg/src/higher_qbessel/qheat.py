"""Heat polynomials of ``B_{r,delta}``, the fundamental solution, the
lattice heat solver and power-series expansions in heat polynomials.

Throughout ``Q = q^r`` and the time derivative is the ``Q``-difference
quotient ``D_{Q,t} u(x,t) = (u(x,Qt) - u(x,t)) / ((Q-1) t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._series import sum_ratio_series
from .errors import DomainError, NonConvergence, OrderOutOfRange, RadiusError
from .qbessel import BesselSpec, apply_B, j_alpha
from .qcalc import LatticeFunction, as_lattice, jackson_0_inf
from .qcore import DEFAULT_TOL, Tolerance, d_ratio, q_factorial, q_gamma, q_number, q_rising
from .qspecial import HyperSpec, e_q, phi_delta

__all__ = [
    "HeatPolySpec",
    "HeatState",
    "EtaMeasure",
    "ExpansionResult",
    "heat_poly",
    "heat_gen_coefficients",
    "heat_gen_check",
    "I_integral",
    "H_norm",
    "iq_moment",
    "kernel_K",
    "kernel_translate",
    "solve_heat",
    "heat_residual",
    "R_function",
    "bound_lemma13",
    "bound_lemma14",
    "expand_direct",
    "expand_entire",
    "STRIP_CAP",
]

STRIP_CAP = 1e12


@dataclass(frozen=True)
class HeatPolySpec:
    """A :class:`BesselSpec` plus the index ``k`` of the distinguished ``alpha_k``."""

    spec: BesselSpec
    k_index: int = 1

    def __post_init__(self):
        r = self.spec.base.r
        if not (1 <= self.k_index <= r - 1):
            raise DomainError(f"k_index must lie in 1..{r - 1}, got {self.k_index}")

    @classmethod
    def make(cls, q: float, r: int, delta: float, alpha: Sequence[float], k_index: int = 1) -> "HeatPolySpec":
        return cls(BesselSpec.make(q, r, delta, alpha), k_index)

    @property
    def base(self):
        return self.spec.base

    @property
    def Q(self) -> float:
        return self.spec.base.Q

    @property
    def alpha_k(self) -> float:
        return self.spec.alpha[self.k_index - 1]

    def norm(self, n: int) -> float:
        return self.spec.norm(n)

    def d_ratio(self, n: int) -> float:
        return d_ratio(self.spec.base, self.spec.alpha, n)


@dataclass(frozen=True)
class EtaMeasure:
    """``d eta(y) = y^(r alpha_k + r - 1) d_q y / ((r)_q^alpha_k Gamma_Q(alpha_k + 1))``."""

    hspec: HeatPolySpec

    @property
    def k_index(self) -> int:
        return self.hspec.k_index

    @property
    def normalization(self) -> float:
        b, a = self.hspec.base, self.hspec.alpha_k
        return b.rq**a * q_gamma(a + 1.0, b.Q)

    def density(self, y):
        b, a = self.hspec.base, self.hspec.alpha_k
        return np.asarray(y, dtype=float) ** (b.r * a + b.r - 1) / self.normalization


@dataclass(frozen=True)
class HeatState:
    """Coefficients ``a_n`` of ``u = sum a_n p_n`` and the strip ``|t| < strip_radius``."""

    coeffs: tuple
    strip_radius: float
    provenance: tuple = ("direct",)
    M: float = math.nan

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if any(self.coeffs) and not self.strip_radius > 0:
            raise DomainError("a nonzero state needs a positive strip radius")

    def __call__(self, hspec: HeatPolySpec, x, t, tol: Tolerance = DEFAULT_TOL) -> float:
        return expand_direct(hspec, self.coeffs, x, t, tol).value

    def initial_data(self, hspec: HeatPolySpec, x) -> float:
        """``u(x, 0) = sum a_n Q^(delta C(n,2)) x^(rn)`` (only ``k = 0`` survives in ``p_n``)."""
        b = hspec.base
        x = float(x)
        return math.fsum(a * b.Q ** (b.delta * n * (n - 1) / 2) * x ** (b.r * n) for n, a in enumerate(self.coeffs))


@dataclass(frozen=True)
class ExpansionResult:
    value: float
    derived: float
    ratio: float
    terms: int


# --- heat polynomials ---------------------------------------------------------------


def heat_poly(hspec: HeatPolySpec, n: int, x, t, *, method: str = "sum"):
    """``p_n^alpha(x, t, q^r; delta)``.

    ``method="sum"``: ``sum_k Q^(delta C(n-k,2)) x^(r(n-k)) t^k/[k]_Q! alpha_{rn}/alpha_{r(n-k)}``.
    ``method="phi"``: ``alpha_{rn}/[n]_Q! t^n _1phi_{r-1}^{delta-1}(Q^-n; Q^(alpha_i+1) | Q; w)``
    with ``w = -(Q-1)^(r-1) x^r Q^n / ((r)_q^r t)``; needs ``delta >= 1`` and ``t != 0``.
    """
    if n < 0:
        raise DomainError("heat polynomials need n >= 0")
    b = hspec.base
    Q, r, d = b.Q, b.r, b.delta
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if method == "sum":
        X = x**r
        an = hspec.norm(n)
        total = np.zeros(np.broadcast(X, t).shape)
        for k in range(n + 1):
            c = Q ** (d * (n - k) * (n - k - 1) / 2) / q_factorial(k, Q) * an / hspec.norm(n - k)
            total = total + c * X ** (n - k) * t**k
        return total[()] if total.ndim == 0 else total
    if method != "phi":
        raise ValueError(f"unknown method {method!r}")
    if d < 1:
        raise DomainError("the 1phi_{r-1}^{delta-1} form needs delta >= 1")
    if np.any(t == 0):
        raise DomainError("the 1phi_{r-1}^{delta-1} form divides by t")
    hs = HyperSpec((-float(n),), tuple(a + 1.0 for a in hspec.spec.alpha), d - 1.0, Q)
    w = -((Q - 1.0) ** (r - 1)) * x**r * Q**n / (b.rq**r * t)
    return hspec.norm(n) / q_factorial(n, Q) * t**n * phi_delta(hs, w)


def heat_gen_coefficients(hspec: HeatPolySpec, x: float, t: float, N: int) -> np.ndarray:
    """Coefficients of ``z^(rn)``, ``n <= N``, of ``e_Q(-z^r t) j_alpha(xz)``,
    from the Cauchy product of the two factor series."""
    b = hspec.base
    Q = b.Q
    e = np.array([(-t) ** m / q_factorial(m, Q) for m in range(N + 1)])
    j = np.array([(-1) ** m * Q ** (b.delta * m * (m - 1) / 2) * x ** (b.r * m) / hspec.norm(m)
                  for m in range(N + 1)])
    return np.convolve(e, j)[: N + 1]


def heat_gen_check(hspec: HeatPolySpec, z: float, x: float, t: float, N: int = 30):
    """``(e_Q(-z^r t) j_alpha(xz), sum_{n<=N} (-1)^n z^(rn) p_n(x,t)/alpha_{rn})``."""
    b = hspec.base
    Q = b.Q
    u = z**b.r * t
    if abs(u) >= 1.0 / (1.0 - Q):
        raise RadiusError(f"|z^r t| = {abs(u):.3g} is outside the e_Q radius 1/(1-Q) = {1 / (1 - Q):.3g}")
    lhs = float(e_q(-u, Q)) * float(j_alpha(hspec.spec, x * z))
    rhs = math.fsum((-1) ** n * z ** (b.r * n) * float(heat_poly(hspec, n, x, t)) / hspec.norm(n)
                    for n in range(N + 1))
    return lhs, rhs


# --- the moment integral and the fundamental solution -----------------------------------


def _e_neg(u, Q: float):
    return e_q(-np.asarray(u, dtype=float), Q, method="product")


def _damped_j(spec: BesselSpec, damp, z):
    """``damp * j_alpha(z)``, skipping points where ``damp`` underflowed
    (``j_alpha`` itself may overflow there)."""
    damp = np.asarray(damp, dtype=float)
    z = np.broadcast_to(np.asarray(z, dtype=float), damp.shape)
    out = np.zeros(damp.shape)
    keep = np.abs(damp) > 1e-300
    if np.any(keep):
        out[keep] = damp[keep] * np.asarray(j_alpha(spec, z[keep]))
    return out[()] if out.ndim == 0 else out


def _damped_power(damp, x, p: float):
    """``damp * x^p`` in log space, zero where ``damp`` underflowed."""
    damp = np.asarray(damp, dtype=float)
    x = np.broadcast_to(np.asarray(x, dtype=float), damp.shape)
    out = np.zeros(damp.shape)
    keep = damp > 0
    out[keep] = np.exp(np.log(damp[keep]) + p * np.log(x[keep]))
    return out[()] if out.ndim == 0 else out


def I_integral(hspec: HeatPolySpec, tol: Tolerance = DEFAULT_TOL) -> float:
    """``I(alpha_k + 1; Q) = int_0^inf e_Q(-x) x^alpha_k d_Q x``."""
    a, Q = hspec.alpha_k, hspec.Q
    if a <= -1:
        raise DomainError("I(alpha_k + 1) needs alpha_k > -1")
    f = LatticeFunction(lambda x: _damped_power(_e_neg(x, Q), x, a), q=Q)
    return jackson_0_inf(f, Q, tol).value


def H_norm(hspec: HeatPolySpec, tol: Tolerance = DEFAULT_TOL) -> float:
    """``H_Q(alpha_k + 1) = I(alpha_k + 1; Q) / Gamma_Q(alpha_k + 1)``."""
    return I_integral(hspec, tol) / q_gamma(hspec.alpha_k + 1.0, hspec.Q)


def iq_moment(hspec: HeatPolySpec, n: int, c: float, tol: Tolerance = DEFAULT_TOL):
    """Both sides of the moment identity
    ``int_0^inf e_Q(-c x^r) c^n x^(rn) x^(r alpha_k + r - 1) d_q x
    = Q^(-n(alpha_k+1) - C(n,2)) (alpha_k+1)_n^Q I(alpha_k+1) / (c^(alpha_k+1) (r)_q)``.

    The left side is a lattice sum, so the identity holds for ``c`` in ``Q^Z``;
    other ``c`` shift the lattice and change ``I``.
    """
    b = hspec.base
    a, Q, r = hspec.alpha_k, b.Q, b.r
    f = LatticeFunction(lambda x: c**n * _damped_power(_e_neg(c * np.asarray(x, dtype=float) ** r, Q),
                                                      x, r * n + r * a + r - 1), q=b.q)
    lhs = jackson_0_inf(f, b.q, tol).value
    rhs = (Q ** (-n * (a + 1) - n * (n - 1) / 2) * q_rising(a + 1.0, n, Q) * I_integral(hspec, tol)
           / (c ** (a + 1) * b.rq))
    return lhs, rhs


def _kernel_check(hspec: HeatPolySpec, t: float):
    if hspec.base.delta <= 1:
        raise DomainError("the fundamental solution is defined for delta > 1")
    if not t > 0:
        raise DomainError("the fundamental solution needs t > 0")


def kernel_K(hspec: HeatPolySpec, x, t: float, tol: Tolerance = DEFAULT_TOL, *, method: str = "series",
             full: bool = False):
    """The fundamental solution ``K_{alpha_k}(x, t, q^r; delta)``.

    ``"series"``: ``H/(t (r)_q)^(alpha_k+1) sum_n (-1)^n Q^(delta C(n,2)) Q^(-(alpha_k+1)n - C(n,2))
    x^(rn) t^-n / ((r)_q^(rn) [n]_Q! prod_{i != k}(alpha_i+1)_n^Q)``.
    ``"phi"``: the same sum as ``_0phi_{r-2}^{delta-1}``.
    ``"integral"``: ``int_0^inf e_Q(-t y^r) j_alpha(xy) d eta(y)``.
    The series forms equal the integral for ``t`` in ``Q^Z``.
    """
    _kernel_check(hspec, t)
    b = hspec.base
    Q, r, a = b.Q, b.r, hspec.alpha_k
    if method == "integral":
        eta = EtaMeasure(hspec)
        x = float(x)

        def g(y):
            y = np.asarray(y, dtype=float)
            return _damped_j(hspec.spec, _e_neg(t * y**r, Q) * eta.density(y), x * y)

        rep = jackson_0_inf(LatticeFunction(g, q=b.q), b.q, tol)
        return rep if full else rep.value
    pref = H_norm(hspec, tol) / (t * b.rq) ** (a + 1)
    others = tuple(al + 1.0 for i, al in enumerate(hspec.spec.alpha) if i != hspec.k_index - 1)
    x = np.asarray(x, dtype=float)
    if method == "phi":
        hs = HyperSpec((), others, b.delta - 1.0, Q)
        w = -(x**r) * Q ** (-(a + 1)) * (Q - 1.0) ** (r - 1) / (b.rq**r * t)
        sv = phi_delta(hs, w, tol, full=True)
        return type(sv)(pref * sv.value, sv.terms, pref * sv.tail) if full else pref * sv.value
    if method != "series":
        raise ValueError(f"unknown method {method!r}")

    def ratio(n):
        den = b.rq**r * q_number(n + 1, Q)
        for c in others:
            den *= q_number(c + n, Q)
        return -(Q ** ((b.delta - 1.0) * n - (a + 1))) / (t * den)

    sv = sum_ratio_series(1.0, ratio, x**r, abs_tol=tol.abs_tol * 0.1, rel_tol=tol.rel_tol * 0.1,
                          max_terms=tol.max_terms)
    if full:
        return type(sv)(pref * sv.value, sv.terms, pref * sv.tail)
    return pref * sv.value


def kernel_translate(hspec: HeatPolySpec, x: float, y: float, t: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """``T^alpha_y K(., t)(x) = int_0^inf e_Q(-t s^r) j_alpha(xs) j_alpha(ys) d eta(s)``,
    from the multiplication formula ``T^alpha_y j_alpha(s .)(x) = j_alpha(sx) j_alpha(sy)``.

    On the lattice ``log|j_alpha(s)| ~ (r log s)^2 / (2 delta log(1/Q))`` while
    ``log e_Q(-t s^r) ~ -(r log s)^2 / (2 log(1/Q))``, so the integral of the
    product of two ``j_alpha`` converges only for ``delta > 2``.
    """
    _kernel_check(hspec, t)
    if hspec.base.delta <= 2:
        raise NonConvergence("the translated kernel integral diverges for delta <= 2")
    b = hspec.base
    eta = EtaMeasure(hspec)

    def g(s):
        s = np.asarray(s, dtype=float)
        damped = _damped_j(hspec.spec, _e_neg(t * s**b.r, b.Q) * eta.density(s), x * s)
        return _damped_j(hspec.spec, damped, y * s)

    return jackson_0_inf(LatticeFunction(g, q=b.q), b.q, tol).value


def solve_heat(hspec: HeatPolySpec, f, x: float, t: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """``u(x, t) = int_0^inf T^alpha_y K(x, t) f(y) d_q y``.

    ``f`` must vanish outside a bounded part of the lattice (``support``,
    ``window`` or atoms); the translated kernel comes from
    :func:`kernel_translate`.
    """
    _kernel_check(hspec, t)
    f = as_lattice(f)
    q = hspec.base.q
    if f.support is not None:
        ks = list(f.support)
    elif f.window is not None:
        lo, hi = f.window
        ks = list(range(lo, hi + 1))
    else:
        raise DomainError("solve_heat needs f with finite support or a lattice window")
    ys = np.array([q**k for k in ks])
    fv = np.asarray(f(ys), dtype=float)
    return math.fsum((1 - q) * y * v * kernel_translate(hspec, x, y, t, tol) for y, v in zip(ys, fv) if v != 0)


def heat_residual(hspec: HeatPolySpec, u, x: float, t: float):
    """``(B_{r,delta,x} u - D_{Q,t} u, scale)`` for a callable ``u(x, t)``.

    ``scale`` is the largest magnitude entering either side, so
    ``|residual| <= tol * scale`` is a relative test.
    """
    b = hspec.base
    Q = b.Q
    ux = lambda s: np.array([u(float(v), t) for v in np.atleast_1d(s)]).reshape(np.shape(s))  # noqa: E731
    lhs = float(apply_B(hspec.spec, ux, x, method="stencil"))
    u0, u1 = u(x, t), u(x, Q * t)
    rhs = (u1 - u0) / ((Q - 1.0) * t)
    scale = max(abs(lhs), abs(rhs), abs(u0) / abs((1 - Q) * t), abs(u0) / abs(x) ** b.r)
    return lhs - rhs, scale


# --- series in heat polynomials -------------------------------------------------------------


def R_function(hspec: HeatPolySpec, x, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """``R(x) = sum_n Q^((delta-1) C(n,2)) x^(rn) / ((r)_q^(rn) prod_i (alpha_i+1)_n^Q)``.

    For ``delta = 1`` the q-damping is absent and the series converges only
    for ``|x|^r < (r)_q^r / (1-Q)^(r-1)``.
    """
    b = hspec.base
    Q, r, d = b.Q, b.r, b.delta
    if d < 1:
        raise DomainError("R needs delta >= 1")
    x = np.asarray(x, dtype=float)
    if d == 1:
        lim = float(np.max(np.abs(x))) ** r * (1 - Q) ** (r - 1) / b.rq**r
        if lim >= 1:
            raise NonConvergence(f"R with delta = 1 diverges here (ratio limit {lim:.3g} >= 1)")
    alpha = tuple(hspec.spec.alpha)

    def ratio(n):
        den = b.rq**r
        for a in alpha:
            den *= q_number(a + 1.0 + n, Q)
        return Q ** ((d - 1.0) * n) / den

    sv = sum_ratio_series(1.0, ratio, x**r, abs_tol=tol.abs_tol * 0.1, rel_tol=tol.rel_tol * 0.1,
                          max_terms=tol.max_terms)
    return sv if full else sv.value


def bound_lemma13(hspec: HeatPolySpec, n: int, x: float, t: float, s: float):
    """``(p_n(|x|,|t|)/alpha_{rn}, s^n/[n]_Q! (1 + |t|/s)^n R(|x|/s^(1/r)))``."""
    if not s > 0:
        raise DomainError("s must be positive")
    if hspec.base.delta < 1:
        raise DomainError("the bound needs delta >= 1")
    b = hspec.base
    lhs = float(heat_poly(hspec, n, abs(x), abs(t))) / hspec.norm(n)
    rhs = s**n / q_factorial(n, b.Q) * (1 + abs(t) / s) ** n * float(R_function(hspec, abs(x) / s ** (1.0 / b.r)))
    return lhs, rhs


def bound_lemma14(hspec: HeatPolySpec, n: int, x: float, t: float):
    """``(p_n(x, t), alpha_{rn} t^n/[n]_Q!)``; equal at ``x = 0``."""
    b = hspec.base
    return float(heat_poly(hspec, n, x, t)), hspec.norm(n) * t**n / q_factorial(n, b.Q)


def _observed_ratio(mags: list[float]) -> float:
    tail = [m for m in mags[len(mags) // 2:] if m > 0]
    if len(tail) < 2:
        return 0.0
    return (tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1))


def expand_direct(hspec: HeatPolySpec, coeffs: Sequence[float], x: float, t: float,
                  tol: Tolerance = DEFAULT_TOL) -> ExpansionResult:
    """``sum_n a_n p_n(x, t)`` and the derived series ``sum_n d_{rn} a_n p_{n-1}(x, t)``
    (which is ``D_{Q,t}`` of the first).

    ``ratio`` is the observed geometric rate of the last half of the terms;
    a non-decaying tail raises :class:`NonConvergence` naming the first
    index where the terms stop shrinking.
    """
    terms, dterms = [], []
    for n, a in enumerate(coeffs):
        if a == 0:
            terms.append(0.0)
            dterms.append(0.0)
            continue
        terms.append(a * float(heat_poly(hspec, n, x, t)))
        dterms.append(a * hspec.d_ratio(n) * float(heat_poly(hspec, n - 1, x, t)) if n else 0.0)
    mags = [abs(v) for v in terms]
    ratio = _observed_ratio(mags)
    total = math.fsum(terms)
    if len(mags) >= 8 and ratio >= 1.0 and mags[-1] > tol.abs_tol + tol.rel_tol * abs(total):
        first = next(i for i in range(len(mags) // 2, len(mags)) if mags[i] > 0)
        for i in range(first + 1, len(mags)):
            if mags[i] >= mags[i - 1] > 0:
                first = i
                break
        raise NonConvergence(f"heat-polynomial expansion does not converge: terms grow from index {first}")
    return ExpansionResult(total, math.fsum(dterms), ratio, len(coeffs))


def expand_entire(hspec: HeatPolySpec, coeffs: Sequence[float], rho: float, sigma: float,
                  *, cap: float = STRIP_CAP) -> HeatState:
    """Heat state for entire data of order ``rho < r/(r-1)`` and type ``sigma``.

    The strip radius is ``1/(sigma rho)^(r/rho)`` (capped at ``cap``); ``M``
    is the smallest constant with ``|a_n| <= M (e sigma rho/(rn))^(rn/rho)``
    over the supplied coefficients.
    """
    r = hspec.base.r
    if not (0 < rho < r / (r - 1)):
        raise OrderOutOfRange(f"order rho={rho} outside (0, r/(r-1)) = (0, {r / (r - 1):.6g})")
    if not (0 <= sigma < math.inf):
        raise DomainError("type sigma must be finite and >= 0")
    M = abs(coeffs[0]) if coeffs else 0.0
    for n, a in enumerate(coeffs[1:], start=1):
        if a == 0:
            continue
        if sigma == 0:
            raise DomainError("type sigma = 0 only admits a constant datum")
        log_bound = (r * n / rho) * math.log(math.e * sigma * rho / (r * n))
        M = max(M, math.exp(math.log(abs(a)) - log_bound))
    radius = cap if sigma == 0 else min(cap, 1.0 / (sigma * rho) ** (r / rho))
    return HeatState(tuple(coeffs), radius, ("entire", rho, sigma), M)
