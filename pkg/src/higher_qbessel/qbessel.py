"""The r-order q-Bessel operator ``B_{r,delta}``, its normalized eigenfunction
``j_alpha`` and the Mehler / Sonine q-integral representations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._series import SeriesValue, sum_ratio_series
from .errors import DomainError
from .qcalc import q_derivative, q_derivative_n
from .qcore import (
    DEFAULT_TOL,
    AlphaVector,
    QBase,
    Tolerance,
    alpha_norm,
    d_ratio,
    log_alpha_norm,
    log_q_gamma,
    q_factorial,
    q_gamma,
    q_number,
    q_rising,
)
from .qspecial import HyperSpec, cos_r, phi_delta

__all__ = [
    "BesselSpec",
    "SonineShift",
    "b_rn_alpha",
    "j_alpha",
    "apply_B",
    "apply_B_power",
    "apply_B2",
    "apply_B3",
    "B_stencil",
    "B_power_stencil",
    "dq_j_alpha",
    "dq_j_alpha_iterated",
    "dqn_series",
    "weight_W",
    "weight_V",
    "mehler_constant",
    "sonine_constant",
    "mehler_j",
    "sonine_j",
    "dqn_j_bound",
    "growth_constant",
]


@dataclass(frozen=True)
class BesselSpec:
    """``(q, r, delta)`` together with the index vector ``alpha``.

    The normalizers ``alpha_{rn,alpha,q}`` are cached in :mod:`qcore`, keyed
    by the same data, so specs are cheap to rebuild.
    """

    base: QBase
    alpha: AlphaVector

    def __post_init__(self):
        if not isinstance(self.alpha, AlphaVector):
            object.__setattr__(self, "alpha", AlphaVector(tuple(self.alpha)))
        if self.alpha.r != self.base.r:
            raise DomainError(f"alpha has {len(self.alpha)} entries, r={self.base.r} needs {self.base.r - 1}")

    @classmethod
    def make(cls, q: float, r: int, delta: float, alpha: Sequence[float]) -> "BesselSpec":
        return cls(QBase(q, r, delta), AlphaVector(tuple(alpha)))

    @classmethod
    def collapse(cls, base: QBase) -> "BesselSpec":
        """The index ``(-1/r, ..., -(r-1)/r)`` for which ``j_alpha = cos_r``."""
        return cls(base, AlphaVector.collapse(base.r))

    def norm(self, n: int) -> float:
        return alpha_norm(self.base, self.alpha, n)

    def shifted(self, p) -> "BesselSpec":
        p = [p] * (self.base.r - 1) if np.isscalar(p) else list(p)
        return BesselSpec(self.base, self.alpha.shifted(p))

    def with_delta(self, delta: float) -> "BesselSpec":
        return BesselSpec(self.base.with_delta(delta), self.alpha)


@dataclass(frozen=True)
class SonineShift:
    p: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if any(v < 1 for v in self.p):
            raise DomainError(f"Sonine shifts need p_i >= 1, got {self.p}")


# --- series ------------------------------------------------------------------


def b_rn_alpha(spec: BesselSpec, n: int, x):
    """``(q^r)^(delta C(n,2)) x^(rn) / alpha_{rn,alpha,q}``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    b = spec.base
    return b.Q ** (b.delta * n * (n - 1) / 2) * np.asarray(x) ** (b.r * n) / spec.norm(n)


def _j_ratio(spec: BesselSpec):
    b = spec.base

    def ratio(n):
        return -(b.Q ** (b.delta * n)) / d_ratio(b, spec.alpha, n + 1)

    return ratio


def j_alpha(spec: BesselSpec, z, tol: Tolerance = DEFAULT_TOL, *, method: str = "series",
            full: bool = False):
    """``j_alpha(z, q^r, delta) = sum_n (-1)^n b_{rn,alpha}(z)``.

    ``method="phi"`` evaluates the same function as
    ``_0 phi_{r-1}^delta(-; Q^(alpha_i+1) | Q; -(Q-1)^r z^r / (r)_q^r)``.
    """
    z = np.asarray(z)
    b = spec.base
    if method == "series":
        sv = sum_ratio_series(1.0, _j_ratio(spec), z**b.r, abs_tol=tol.abs_tol * 0.1,
                              rel_tol=tol.rel_tol * 0.1, max_terms=tol.max_terms)
        return sv if full else sv.value
    if method == "phi":
        hs = HyperSpec((), tuple(a + 1 for a in spec.alpha), b.delta, b.Q)
        w = -((b.Q - 1.0) ** b.r) * z**b.r / b.rq**b.r
        return phi_delta(hs, w, tol, full=full)
    raise ValueError(f"unknown method {method!r}")


def dqn_series(coef, r: int, n: int, x, q: float, tol: Tolerance = DEFAULT_TOL):
    """``D_q^n`` of ``sum_m coef(m) x^(rm)`` taken term by term (valid at ``x = 0``).

    Uses ``D_q^n x^k = [k]_q!/[k-n]_q! x^(k-n)``.
    """
    x = np.asarray(x, dtype=float)
    m = -(-n // r)
    total = np.zeros_like(x)
    quiet = 0
    while quiet < 3:
        k = r * m
        term = coef(m) * q_factorial(k, q) / q_factorial(k - n, q) * x ** (k - n)
        total = total + term
        mag = float(np.max(np.abs(term)))
        quiet = quiet + 1 if mag <= tol.abs_tol + tol.rel_tol * float(np.max(np.abs(total))) else 0
        m += 1
        if m > tol.max_terms:
            break
    return total[()] if total.ndim == 0 else total


def _j_coef(spec: BesselSpec):
    b = spec.base
    return lambda m: (-1) ** m * b.Q ** (b.delta * m * (m - 1) / 2) / spec.norm(m)


def dq_j_alpha(spec: BesselSpec, x, tol: Tolerance = DEFAULT_TOL):
    """``D_q j_alpha(x) = -(x/(r)_q)^(r-1) / prod (alpha_i+1)_{q^r} * j_{alpha+1}(q^delta x)``."""
    b = spec.base
    x = np.asarray(x)
    den = np.prod([q_number(a + 1, b.Q) for a in spec.alpha])
    return -((x / b.rq) ** (b.r - 1)) / den * j_alpha(spec.shifted(1), b.q**b.delta * x, tol)


def dq_j_alpha_iterated(spec: BesselSpec, x, n: int, tol: Tolerance = DEFAULT_TOL):
    """``{x^-(r-1) D_q}^n j_alpha(x)``.

    Equal to ``(r)_q^(-(r-1)n) (-1)^n Q^(delta C(n,2)) / prod (alpha_i+1)_n^Q
    * j_{alpha+n}(q^(n delta) x)`` with ``Q = q^r``.
    """
    b = spec.base
    den = np.prod([q_rising(a + 1, n, b.Q) for a in spec.alpha])
    pref = b.rq ** (-(b.r - 1) * n) * (-1) ** n * b.Q ** (b.delta * n * (n - 1) / 2) / den
    return pref * j_alpha(spec.shifted(n), b.q ** (n * b.delta) * np.asarray(x), tol)


# --- the operator --------------------------------------------------------------


def _a(spec: BesselSpec):
    return [spec.base.r * a + 1 for a in spec.alpha]


def apply_B(spec: BesselSpec, f, x, *, method: str = "operator"):
    """``B_{r,delta} f(x)``.

    ``method="operator"`` composes ``D_q``, the first-order factors
    ``q^(r alpha_i + 1) x D_q + (r alpha_i + 1)_q`` (i = r-1 innermost),
    the division by ``x^(r-1)`` and the shift ``Lambda_{q^delta}^{-1}``
    literally.  ``method="stencil"`` uses the equivalent ``(r+1)``-point
    formula from :func:`B_stencil`.
    """
    x = np.asarray(x)
    if np.any(x == 0):
        raise DomainError("B_{r,delta} f is evaluated through difference quotients; x = 0 is excluded")
    b = spec.base
    q = b.q
    if method == "stencil":
        y = q ** (-b.delta) * x
        coeffs = B_stencil(spec)
        return y ** (-b.r) * sum(c * f(q**j * y) for j, c in enumerate(coeffs))
    if method != "operator":
        raise ValueError(f"unknown method {method!r}")

    g = lambda t: q_derivative(f, t, q)  # noqa: E731
    for a in reversed(_a(spec)):
        g = _factor(g, a, q)
    y = q ** (-b.delta) * x
    return g(y) / y ** (b.r - 1)


def _factor(h, a: float, q: float):
    ca, cb = q**a, q_number(a, q)
    return lambda t: ca * t * q_derivative(h, t, q) + cb * h(t)


def apply_B2(spec: BesselSpec, f, x):
    """``r = 2``: ``Lambda^-1 (q^(2a+1) D_q^2 f + (2a+1)_q/x D_q f)``."""
    b = spec.base
    if b.r != 2:
        raise DomainError("apply_B2 needs r = 2")
    q, (al,) = b.q, spec.alpha
    y = q ** (-b.delta) * np.asarray(x)
    return q ** (2 * al + 1) * q_derivative_n(f, y, q, 2) + q_number(2 * al + 1, q) / y * q_derivative(f, y, q)


def apply_B3(spec: BesselSpec, f, x):
    """``r = 3``, ``alpha = (-2/3, nu - 1/3)``:
    ``Lambda^-1 (q^(3nu) D^3 f + (3nu)_q/(q x) D^2 f - (3nu)_q/(q x^2) D f)``."""
    b = spec.base
    if b.r != 3 or abs(spec.alpha[0] + 2.0 / 3.0) > 1e-12:
        raise DomainError("apply_B3 needs r = 3 and alpha_1 = -2/3")
    q = b.q
    nu = spec.alpha[1] + 1.0 / 3.0
    c = q_number(3 * nu, q) / q
    y = q ** (-b.delta) * np.asarray(x)
    return (q ** (3 * nu) * q_derivative_n(f, y, q, 3) + c / y * q_derivative_n(f, y, q, 2)
            - c / y**2 * q_derivative(f, y, q))


@lru_cache(maxsize=256)
def _stencil(q: float, r: int, a: tuple[float, ...]) -> tuple[float, ...]:
    poly = np.array([1.0, -1.0])  # 1 - S, ascending powers of S
    for ai in a:
        poly = np.convolve(poly, [1.0, -(q ** (ai - 1))])
    return tuple(poly / (1.0 - q) ** r)


def B_stencil(spec: BesselSpec) -> tuple[float, ...]:
    """Coefficients ``p_j`` with ``B f(x) = y^-r sum_j p_j f(q^j y)``, ``y = q^-delta x``.

    Each factor acts on ``D_q f`` as ``h(y) -> (h(y) - q^(a_i) h(qy))/(1-q)``,
    so ``B`` is the polynomial ``prod_i (1 - q^(a_i - 1) S) (1 - S) / (1-q)^r``
    in the dilation ``S h(y) = h(qy)``.  The factors commute.
    """
    return _stencil(spec.base.q, spec.base.r, tuple(_a(spec)))


@lru_cache(maxsize=1024)
def _power_stencil(q: float, r: int, delta: float, a: tuple[float, ...], n: int) -> tuple[float, ...]:
    if n == 0:
        return (1.0,)
    p = _stencil(q, r, a)
    prev = _power_stencil(q, r, delta, a, n - 1)
    out = np.zeros(r * n + 1)
    for i, pi in enumerate(p):
        c = q ** (delta * r) * pi * q ** (-(i - delta) * r * (n - 1))
        out[i:i + len(prev)] += c * np.asarray(prev)
    return tuple(out)


def B_power_stencil(spec: BesselSpec, n: int) -> tuple[float, ...]:
    """``gamma_j`` with ``B^n f(x) = x^(-rn) sum_j gamma_j f(q^(j - n delta) x)``."""
    b = spec.base
    return _power_stencil(b.q, b.r, float(b.delta), tuple(_a(spec)), n)


def apply_B_power(spec: BesselSpec, f, x, n: int, *, noise: bool = False):
    """``B^n f(x)`` from the cached ``(rn+1)``-point stencil.

    With ``noise=True`` also return ``sum_j |gamma_j f_j| x^-rn``, the scale
    of the cancellation (multiply by the working precision to get the
    rounding error).
    """
    b = spec.base
    x = float(x)
    if x == 0:
        raise DomainError("B^n f is evaluated through difference quotients; x = 0 is excluded")
    g = B_power_stencil(spec, n)
    pts = x * b.q ** (np.arange(len(g)) - n * b.delta)
    vals = np.asarray(f(pts))
    terms = np.asarray(g) * vals
    scale = x ** (-b.r * n)
    val = scale * terms.sum()
    if noise:
        return val, scale * float(np.sum(np.abs(terms)))
    return val


# --- integral representations ----------------------------------------------------


def _pow_ratio(u, e: float, Q: float, eps: float = 1e-18):
    """``(1 - Q u)_Q^e = (Qu; Q)_inf / (Q^(e+1) u; Q)_inf`` for ``0 <= u <= 1`` (vectorized)."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    Qj = Q
    while Qj > eps:
        out = out * (1.0 - Qj * u) / (1.0 - Qj * Q**e * u)
        Qj *= Q
    return out


def weight_W(spec: BesselSpec, t: Sequence) -> np.ndarray:
    """``prod_i (1 - q^r t_i^r)_{q^r}^(alpha_i - i/r) t_i^(i-1)``."""
    b = spec.base
    if len(t) != b.r - 1:
        raise DomainError(f"weight_W takes r-1 = {b.r - 1} variables")
    out = 1.0
    for i, (a, ti) in enumerate(zip(spec.alpha, t), start=1):
        ti = np.asarray(ti, dtype=float)
        out = out * _pow_ratio(ti**b.r, a - i / b.r, b.Q) * ti ** (i - 1)
    return out


def weight_V(spec: BesselSpec, shift: SonineShift, t: Sequence) -> np.ndarray:
    """``prod_i (1 - q^r t_i^r)_{q^r}^(p_i - 1) t_i^(r(alpha_i - i/r + 1)) t_i^(i-1)``."""
    b = spec.base
    if len(t) != b.r - 1 or len(shift.p) != b.r - 1:
        raise DomainError(f"weight_V takes r-1 = {b.r - 1} variables and shifts")
    out = 1.0
    for i, (a, p, ti) in enumerate(zip(spec.alpha, shift.p, t), start=1):
        ti = np.asarray(ti, dtype=float)
        out = out * _pow_ratio(ti**b.r, p - 1.0, b.Q) * ti ** (b.r * (a - i / b.r + 1) + i - 1)
    return out


def mehler_constant(spec: BesselSpec) -> float:
    """``C_{r,alpha} = (r)_q^(r-1) prod Gamma_Q(alpha_i+1)/(Gamma_Q(i/r) Gamma_Q(alpha_i-i/r+1))``."""
    b = spec.base
    spec.alpha.check_strict()
    s = (b.r - 1) * math.log(b.rq)
    for i, a in enumerate(spec.alpha, start=1):
        s += log_q_gamma(a + 1, b.Q) - log_q_gamma(i / b.r, b.Q) - log_q_gamma(a - i / b.r + 1, b.Q)
    return math.exp(s)


def sonine_constant(spec: BesselSpec, shift: SonineShift) -> float:
    """``D_{r,alpha,p} = (r)_q^(r-1) prod Gamma_Q(alpha_i+p_i+1)/(Gamma_Q(p_i) Gamma_Q(alpha_i+1))``."""
    b = spec.base
    s = (b.r - 1) * math.log(b.rq)
    for a, p in zip(spec.alpha, shift.p):
        s += log_q_gamma(a + p + 1, b.Q) - log_q_gamma(p, b.Q) - log_q_gamma(a + 1, b.Q)
    return math.exp(s)


def _axis_len(q: float) -> int:
    return int(math.ceil(math.log(1e-18) / math.log(q))) + 1


def _product_weights(axis_weights: list[np.ndarray], N: int) -> np.ndarray:
    """Mass of the iterated lattice on each level ``t_1...t_{r-1} = q^s``, ``s < N``."""
    c = np.array([1.0])
    for w in axis_weights:
        c = np.convolve(c, w)[:N]
    return c


def _lattice_integral(levels: np.ndarray, kernel, z, q: float):
    z = np.asarray(z, dtype=float)
    pts = np.multiply.outer(z, q ** np.arange(len(levels), dtype=float))
    return np.asarray(kernel(pts)) @ levels


def mehler_j(spec: BesselSpec, z, tol: Tolerance = DEFAULT_TOL, *, terms: int | None = None):
    """``C_{r,alpha} int_[0,1]^(r-1) W_alpha(t) cos_r(z t_1...t_{r-1}) d_q t``.

    The ``r-1`` Jackson sums are iterated over the product lattice; since
    the integrand depends on the ``t_i`` only through their product, the
    per-axis weights are convolved into one level sequence first.
    """
    b = spec.base
    spec.alpha.check_strict()
    q = b.q
    N = terms or _axis_len(q)
    k = np.arange(N, dtype=float)
    t = q**k
    axes = []
    for i, a in enumerate(spec.alpha, start=1):
        axes.append((1.0 - q) * t * _pow_ratio(t**b.r, a - i / b.r, b.Q) * t ** (i - 1))
    levels = _product_weights(axes, N)
    val = mehler_constant(spec) * _lattice_integral(levels, lambda p: cos_r(p, b, tol), z, q)
    return val[()] if np.ndim(val) == 0 else val


def sonine_j(spec: BesselSpec, shift: SonineShift, z, tol: Tolerance = DEFAULT_TOL, *,
             terms: int | None = None):
    """``D_{r,alpha,p} int_[0,1]^(r-1) V_p(t) j_alpha(z t_1...t_{r-1}) d_q t``, equal to ``j_{alpha+p}(z)``."""
    b = spec.base
    if len(shift.p) != b.r - 1:
        raise DomainError(f"need r-1 = {b.r - 1} shifts")
    q = b.q
    N = terms or _axis_len(q)
    t = q ** np.arange(N, dtype=float)
    axes = []
    for i, (a, p) in enumerate(zip(spec.alpha, shift.p), start=1):
        axes.append((1.0 - q) * t * _pow_ratio(t**b.r, p - 1.0, b.Q) * t ** (b.r * (a - i / b.r + 1) + i - 1))
    levels = _product_weights(axes, N)
    val = sonine_constant(spec, shift) * _lattice_integral(levels, lambda p: j_alpha(spec, p, tol), z, q)
    return val[()] if np.ndim(val) == 0 else val


# --- bounds ------------------------------------------------------------------


def _cos_coef(base: QBase):
    return lambda m: (-1) ** m * base.Q ** (base.delta * m * (m - 1) / 2) / q_factorial(base.r * m, base.q)


def dqn_j_bound(spec: BesselSpec, n: int, x: float, tol: Tolerance = DEFAULT_TOL,
                lattice_depth: int = 200) -> tuple[float, float]:
    """``(|D_q^n j_alpha(x)|, K_n * sup_{k>=0} |D_q^n cos_r(x q^k)|)``.

    ``K_n = prod Gamma_Q(alpha_i+1) Gamma_Q((n+i)/r) / (Gamma_Q(i/r) Gamma_Q(alpha_i+1+n/r))``
    is the Mehler weight's ``t^n`` moment.  The supremum over the points
    ``x q^k`` reached by the Mehler integrand makes the inequality a theorem;
    the pointwise form ``K_n |D_q^n cos_r(x)|`` fails near zeros of the
    derivative.  Derivatives are taken on the series, so ``x = 0`` is fine.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    b = spec.base
    lhs = abs(float(dqn_series(_j_coef(spec), b.r, n, x, b.q, tol)))
    K = 1.0
    for i, a in enumerate(spec.alpha, start=1):
        K *= (q_gamma(a + 1, b.Q) * q_gamma((n + i) / b.r, b.Q)
              / (q_gamma(i / b.r, b.Q) * q_gamma(a + 1 + n / b.r, b.Q)))
    pts = x * b.q ** np.arange(lattice_depth, dtype=float)
    sup = float(np.max(np.abs(dqn_series(_cos_coef(b), b.r, n, pts, b.q, tol))))
    return lhs, K * sup


def growth_constant(spec: BesselSpec, n_max: int = 40) -> float:
    """Smallest ``C`` with ``b_{rn,alpha}(1) <= C (Q^(-|alpha|/r))^n (e/(n (r)_q))^(rn+|alpha|)``
    for ``1 <= n <= n_max`` (measured; no closed value is known)."""
    b = spec.base
    A = spec.alpha.abs_alpha
    best = 0.0
    for n in range(1, n_max + 1):
        lhs = b.delta * n * (n - 1) / 2 * math.log(b.Q) - log_alpha_norm(b, spec.alpha, n)
        rhs = -n * A / b.r * math.log(b.Q) + (b.r * n + A) * (1.0 - math.log(n * b.rq))
        best = max(best, math.exp(lhs - rhs))
    return best
