"""q-exponentials, delta-deformed basic hypergeometric series, and the
r-order q-trigonometric functions ``cos_r`` and ``sin_{r,l}``.

All evaluators accept real or complex scalars and numpy arrays.  Pass
``full=True`` to get a :class:`~higher_qbessel._series.SeriesValue` carrying
the number of terms and the tail majorant instead of the bare value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from ._series import SeriesValue, TruncatedSeries, sum_ratio_series
from .errors import DegenerateDenominator, DomainError, NonConvergence, RadiusError
from .qcore import (
    DEFAULT_TOL,
    QBase,
    Tolerance,
    q_binomial_coeff,
    q_factorial,
    q_number,
    q_pochhammer_inf,
)

__all__ = [
    "HyperSpec",
    "e_q",
    "E_q",
    "e_q_delta",
    "phi_delta",
    "phi_delta_series",
    "b_rm",
    "cos_r",
    "sin_rl",
    "cos_r_series",
    "cos_r_roots_of_unity",
    "dq_cos_r",
    "cos_product",
    "roots_of_unity",
]


def _out(sv: SeriesValue, full: bool):
    return sv if full else sv.value


def _kw(tol: Tolerance):
    return dict(abs_tol=tol.abs_tol * 0.1, rel_tol=tol.rel_tol * 0.1, max_terms=tol.max_terms)


def roots_of_unity(r: int) -> np.ndarray:
    """``w_k = exp(2 i pi (k-1)/r)``, ``k = 1..r``."""
    return np.exp(2j * np.pi * np.arange(r) / r)


# --- exponentials ---------------------------------------------------------


def e_q(x, q: float, tol: Tolerance = DEFAULT_TOL, *, method: str = "auto", full: bool = False):
    """Small q-exponential ``e_q(x) = sum x^n/[n]_q! = 1/(1-(1-q)x)_q^inf``.

    ``method="series"`` is only valid for ``|x| < 1/(1-q)``; ``"auto"`` uses
    the series inside half that radius and the product otherwise.
    """
    x_arr = np.asarray(x)
    radius = 1.0 / (1.0 - q)
    if method == "auto":
        method = "series" if np.all(np.abs(x_arr) < 0.5 * radius) else "product"
    if method == "series":
        if np.any(np.abs(x_arr) >= radius):
            raise RadiusError(f"e_q series needs |x| < 1/(1-q) = {radius}")
        sv = sum_ratio_series(1.0, lambda n: 1.0 / q_number(n + 1, q), x_arr, **_kw(tol))
        return _out(sv, full)
    if method != "product":
        raise ValueError(f"unknown method {method!r}")
    den = _inf_product(-(1.0 - q) * x_arr, q, tol)
    if np.any(den == 0):
        raise RadiusError("e_q product has a vanishing factor at x = q^-k/(1-q)")
    val = 1.0 / den
    val = val[()] if np.ndim(val) == 0 else val
    return SeriesValue(val, _q_factors(q, tol), 0.0) if full else val


def _q_factors(q, tol):
    return int(math.ceil(math.log(tol.abs_tol) / math.log(q))) + 1


def _inf_product(a, q: float, tol: Tolerance):
    """``prod_{j>=0} (1 + a q^j)`` (vectorized)."""
    a = np.asarray(a)
    out = np.ones_like(a, dtype=np.result_type(a, float))
    x = a.astype(out.dtype, copy=True)
    for _ in range(tol.max_terms):
        if np.all(np.abs(x) < tol.abs_tol):
            return out
        with np.errstate(over="ignore"):  # inf is the right limit; 1/inf = 0 downstream
            out = out * (1.0 + x)
        x = x * q
    raise NonConvergence("infinite product did not converge")


def E_q(x, q: float, tol: Tolerance = DEFAULT_TOL, *, method: str = "series", full: bool = False):
    """Big q-exponential ``E_q(x) = sum q^C(n,2) x^n/[n]_q! = (1+(1-q)x)_q^inf``."""
    if method == "product":
        val = _inf_product((1.0 - q) * np.asarray(x), q, tol)
        val = val[()] if np.ndim(val) == 0 else val
        return SeriesValue(val, _q_factors(q, tol), 0.0) if full else val
    return e_q_delta(x, q, 1.0, tol, full=full)


def e_q_delta(x, q: float, delta: float, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """``e_q(x, delta) = sum q^(delta C(n,2)) x^n/[n]_q!``, entire for ``delta > 0``."""
    if delta <= 0:
        raise DomainError("e_q_delta needs delta > 0")
    sv = sum_ratio_series(1.0, lambda n: q ** (delta * n) / q_number(n + 1, q), x, **_kw(tol))
    return _out(sv, full)


# --- delta-deformed basic hypergeometric series ----------------------------


@dataclass(frozen=True)
class HyperSpec:
    """Parameters of ``_r phi_s^delta``.

    ``numerator`` and ``denominator`` hold the base exponents ``a_i``, ``b_j``
    (the series is written with ``base**a_i``); ``delta`` is the damping
    exponent and ``base`` the series base, e.g. ``q**r``.
    """

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]
    delta: float
    base: float

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(float(a) for a in self.numerator))
        object.__setattr__(self, "denominator", tuple(float(b) for b in self.denominator))
        if not (0.0 < self.base < 1.0):
            raise DomainError("base must lie in (0, 1)")
        if self.delta < 0:
            raise DomainError("delta must be >= 0")
        if not (len(self.numerator) < len(self.denominator) + 1 or self.terminating is not None):
            raise DomainError("need r < s + 1 (or a terminating numerator)")

    @property
    def terminating(self):
        """Index after which the series vanishes (a numerator ``-n``), else ``None``."""
        ns = [int(round(-a)) for a in self.numerator if a <= 0 and float(a).is_integer()]
        return min(ns) if ns else None

    @property
    def argument_scale(self) -> float:
        """``(base - 1)^(1+s-r)``: displayed argument = scale * series variable."""
        return (self.base - 1.0) ** (1 + len(self.denominator) - len(self.numerator))


def _phi_ratio(spec: HyperSpec):
    Q = spec.base

    def ratio(k):
        num = Q ** (spec.delta * k)
        for a in spec.numerator:
            num *= q_number(a + k, Q)
        den = q_number(k + 1, Q)
        for b in spec.denominator:
            den *= q_number(b + k, Q)
        if den == 0:
            if num == 0:
                return 0.0
            raise DegenerateDenominator(f"(b_j)_k vanishes at k={k + 1}")
        return num / den

    return ratio


def phi_delta_series(spec: HyperSpec, z, tol: Tolerance = DEFAULT_TOL) -> SeriesValue:
    """``sum_k base^(delta C(k,2)) prod(a_i)_k / prod(b_j)_k z^k/[k]!`` in the series variable ``z``."""
    z = np.asarray(z)
    term_stop = spec.terminating
    if spec.delta == 0 and term_stop is None:
        lim = float(np.max(np.abs(z))) * (1.0 - spec.base) ** (
            len(spec.denominator) + 1 - len(spec.numerator)
        )
        if lim >= 1.0:
            raise RadiusError(f"phi series with delta=0 diverges (ratio limit {lim:.3g} >= 1)")
    kw = _kw(tol)
    if term_stop is not None:
        kw["min_terms"] = term_stop + 1
    return sum_ratio_series(1.0, _phi_ratio(spec), z, **kw)


def phi_delta(spec: HyperSpec, w, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """``_r phi_s^delta`` at the displayed argument ``w = (base-1)^(1+s-r) z``.

    With ``delta = 1 + s - r`` this is the classical ``_r phi_s``.
    """
    z = np.asarray(w) / spec.argument_scale
    return _out(phi_delta_series(spec, z, tol), full)


# --- r-order q-trigonometric functions -------------------------------------


def b_rm(m: int, x, base: QBase):
    """``b_{rm}(x, q^r; delta) = q^(delta r C(m,2)) x^(rm) / [rm]_q!``."""
    if m < 0:
        raise DomainError("m must be >= 0")
    q, r, d = base.q, base.r, base.delta
    return q ** (d * r * m * (m - 1) / 2) * np.asarray(x) ** (r * m) / q_factorial(r * m, q)


def _cos_ratio(base: QBase):
    q, r, d = base.q, base.r, base.delta

    def ratio(m):
        den = 1.0
        for j in range(1, r + 1):
            den *= q_number(r * m + j, q)
        return -(q ** (d * r * m)) / den

    return ratio


def cos_r(x, base: QBase, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """``cos_r(x, q^r; delta) = sum_m (-1)^m b_{rm}(x, q^r; delta)``.

    Entire in ``x`` for every ``delta > 0``.
    """
    x = np.asarray(x)
    sv = sum_ratio_series(1.0, _cos_ratio(base), x**base.r, **_kw(tol))
    return _out(sv, full)


def cos_r_series(base: QBase, order: int, radius: float = 1.0) -> TruncatedSeries:
    """Coefficients of ``cos_r`` in powers of ``x**r`` up to ``order``."""
    coeffs = [(-1) ** m * float(b_rm(m, 1.0, base)) for m in range(order + 1)]
    nxt = abs(float(b_rm(order + 1, radius, base)))
    return TruncatedSeries(tuple(coeffs), base.r, order, 2.0 * nxt, radius)


def sin_rl(x, l: int, base: QBase, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """``sin_{r,l}(x) = sum_m (-1)^m q^(delta r C(m,2)) x^(rm+r-l)/[rm+r-l]_q!``."""
    q, r, d = base.q, base.r, base.delta
    if not (1 <= l <= r - 1):
        raise DomainError(f"sin_rl needs 1 <= l <= r-1 (l={l}, r={r})")
    x = np.asarray(x)
    p = r - l

    def ratio(m):
        den = 1.0
        for j in range(1, r + 1):
            den *= q_number(r * m + p + j, q)
        return -(q ** (d * r * m)) / den

    first = x**p / q_factorial(p, q)
    sv = sum_ratio_series(1.0, ratio, x**r, **_kw(tol))
    if full:
        return SeriesValue(first * sv.value, sv.terms, float(np.max(np.abs(first))) * sv.tail)
    return first * sv.value


def dq_cos_r(x, l: int, base: QBase, tol: Tolerance = DEFAULT_TOL):
    """Closed-form ``D_q^l cos_r``: ``-q^(-delta(r-l)) sin_{r,l}(q^delta x)`` for
    ``1 <= l <= r-1`` and ``-cos_r(q^delta x)`` for ``l = r``."""
    q, r, d = base.q, base.r, base.delta
    x = np.asarray(x)
    if l == 0:
        return cos_r(x, base, tol)
    if l == r:
        return -cos_r(q**d * x, base, tol)
    return -(q ** (-d * (r - l))) * sin_rl(q**d * x, l, base, tol)


def cos_r_roots_of_unity(x, base: QBase, tol: Tolerance = DEFAULT_TOL):
    """``cos_r`` rebuilt from the r-th roots of unity.

    ``cos_r(x, q^r; r delta) = (1/r) sum_k e_q(mu w_k x q^(-delta(r-1)/2), delta)``
    with ``mu = exp(i pi/r)``.  Here ``base.delta`` plays the role of
    ``r delta`` on the left-hand side.
    """
    q, r = base.q, base.r
    inner = base.delta / r
    mu = cmath.exp(1j * math.pi / r)
    x = np.asarray(x, dtype=complex)
    shift = q ** (-inner * (r - 1) / 2)
    total = 0
    for w in roots_of_unity(r):
        total = total + e_q_delta(mu * w * x * shift, q, inner, tol)
    return total / r


def _cos_r_mp(x, base: QBase):
    """``cos_r`` summed in the current mpmath precision (real scalar ``x``)."""
    q = mpmath.mpf(base.q)
    r, d = base.r, mpmath.mpf(base.delta)
    xr = mpmath.mpf(x) ** r
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps)
    term = mpmath.mpf(1)
    total = term
    m = 0
    while True:
        den = mpmath.mpf(1)
        for j in range(1, r + 1):
            den *= (1 - q ** (r * m + j)) / (1 - q)
        term = -term * q ** (d * r * m) * xr / den
        total += term
        m += 1
        if abs(term) < eps * max(1, abs(total)) and abs(q ** (d * r * m) * xr) < 1:
            return total


def cos_product(x, y, base: QBase, tol: Tolerance = DEFAULT_TOL, *, full: bool = False):
    """Double-sum expression for ``cos_r(x) cos_r(y)`` (requires ``y != 0``).

    ``sum_k q^(delta r k^2) (-1)^(rk) q^(-C(rk,2)) (x/y)^(rk) / ((1-q)^(rk) [rk]_q!)
    * sum_s (-1)^s q^C(s,2) [rk, s]_q cos_r(y q^(rk - s - delta k))``.

    The inner sum is an ``rk``-th order q-difference whose cancellation
    grows like ``q^C(rk,2)``, so both sums are carried out in mpmath with the
    working precision raised accordingly.  Real arguments only.
    """
    q, r, d = base.q, base.r, base.delta
    if y == 0:
        raise DomainError("cos_product requires y != 0")
    x, y = float(x), float(y)
    lost = lambda k: (r * k) * (r * k - 1) / 2 * math.log10(1.0 / q)  # noqa: E731
    total = mpmath.mpf(0)
    quiet = 0
    for k in range(tol.max_terms):
        rk = r * k
        with mpmath.workdps(30 + int(lost(k))):
            qm = mpmath.mpf(q)
            pref = (
                (-1) ** rk
                * qm ** (d * r * k * k - mpmath.mpf(rk * (rk - 1)) / 2)
                * (mpmath.mpf(x) / y) ** rk
                / ((1 - qm) ** rk * mpmath.qp(qm, qm, rk) / (1 - qm) ** rk)
            )
            inner = mpmath.mpf(0)
            for s in range(rk + 1):
                w = (-1) ** s * qm ** (s * (s - 1) // 2) * _qbinom_mp(rk, s, qm)
                inner += w * _cos_r_mp(y * qm ** (rk - s - d * k), base)
            term = pref * inner
        total += term
        if k > 0 and abs(term) <= tol.abs_tol + tol.rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                val = float(total)
                return SeriesValue(val, k + 1, float(abs(term))) if full else val
        else:
            quiet = 0
    raise NonConvergence("product-formula outer series did not converge")


def _qbinom_mp(n, k, q):
    return mpmath.qp(q, q, n) / (mpmath.qp(q, q, k) * mpmath.qp(q, q, n - k))
