"""q-Fourier transforms, the translations ``tau_x`` and ``T^alpha_x``, their
lattice transposes and the two convolution products.

Both translations are series ``sum_n c_n(y) L^n f(x)`` whose operator
powers are ``(rn+1)``-point q-difference stencils.  The stencil weights and
the ``c_n`` are combined before summation (in log space for ``tau``, by a
rescaled recurrence for ``T^alpha``) so nothing overflows, and the series is
cut when a term drops to the rounding noise of its own stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DomainError, NonConvergence
from .qbessel import BesselSpec, B_stencil, j_alpha
from .qcalc import (
    IntegrationReport,
    LatticeFunction,
    as_lattice,
    jackson_0_inf,
    lattice_index,
)
from .qcore import DEFAULT_TOL, QBase, Tolerance, d_ratio
from .qspecial import cos_r

__all__ = [
    "TransformResult",
    "TranslationPlan",
    "TranslationResult",
    "fourier",
    "fourier0",
    "lambda_dqr_n",
    "lambda_dqr_n_composed",
    "translate_tau",
    "translate_T_alpha",
    "tau_atom",
    "transpose_tau",
    "convolve0",
    "convolve_alpha",
]

# relative rounding level assumed for stencil sums of sampled values
_EPS = 1e-15


@dataclass(frozen=True)
class TransformResult:
    value: complex
    lam: float
    report: IntegrationReport


@dataclass(frozen=True)
class TranslationPlan:
    """Truncation policy for the translation series.

    ``n_max`` caps the number of operator powers; ``noise_factor`` is how far
    above its own rounding noise a term must be to be trusted.
    """

    n_max: int = 24
    tol: Tolerance = DEFAULT_TOL
    noise_factor: float = 4.0

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")


@dataclass(frozen=True)
class TranslationResult:
    value: float
    terms: int
    tail: float
    noise: float


DEFAULT_PLAN = TranslationPlan()


# --- Fourier transforms ----------------------------------------------------------


def _masked_kernel(f, kernel):
    """``t -> f(t) * kernel(t)``, evaluating the kernel only where ``f != 0``."""

    def g(t):
        t = np.asarray(t, dtype=float)
        fv = np.asarray(f(t))
        out = np.zeros(np.broadcast(t, fv).shape, dtype=np.result_type(fv, float))
        nz = fv != 0
        if np.any(nz):
            tt = np.broadcast_to(t, out.shape)[nz]
            out[nz] = np.broadcast_to(fv, out.shape)[nz] * kernel(tt)
        return out[()] if out.ndim == 0 else out

    return g


def _with_meta(g, f: LatticeFunction) -> LatticeFunction:
    return LatticeFunction(g, window=f.window, support=f.support, q=f.q)


def fourier(spec: BesselSpec, f, lam: float, tol: Tolerance = DEFAULT_TOL) -> TransformResult:
    """``F(f)(lambda) = int_0^inf f(t) j_alpha(lambda t) d_q t``."""
    f = as_lattice(f)
    g = _masked_kernel(f, lambda t: j_alpha(spec, lam * t, tol))
    rep = jackson_0_inf(_with_meta(g, f), spec.base.q, tol)
    return TransformResult(rep.value, lam, rep)


def fourier0(base: QBase, f, lam: float, tol: Tolerance = DEFAULT_TOL) -> TransformResult:
    """``F_0(f)(lambda) = int_0^inf f(t) cos_r(lambda t) d_q t``."""
    f = as_lattice(f)
    g = _masked_kernel(f, lambda t: cos_r(lam * t, base, tol))
    rep = jackson_0_inf(_with_meta(g, f), base.q, tol)
    return TransformResult(rep.value, lam, rep)


# --- Lambda^{-1} D^r powers --------------------------------------------------------


@lru_cache(maxsize=64)
def _log_qq(q: float, size: int) -> np.ndarray:
    """``log (q;q)_k`` for ``k < size``."""
    out = np.zeros(size)
    out[1:] = np.cumsum(np.log1p(-(q ** np.arange(1, size, dtype=float))))
    return out


def _tau_weights(base: QBase, n: int, log_ratio: float, sign: int):
    """Signed weights ``w_k`` with ``b_rn(y) L^n f(x) = sum_k w_k f(q^(k - delta n) x)``.

    ``w_k = (-1)^k (y/x)^(rn) q^(delta r n^2 - C(rn,2) + C(rn-k,2)) / ((q;q)_k (q;q)_(rn-k))``.
    ``log_ratio = log|y/x|``; ``sign`` is the sign of ``(y/x)^(rn)``.
    """
    q, r, d = base.q, base.r, base.delta
    rn = r * n
    k = np.arange(rn + 1)
    lq = _log_qq(q, rn + 1)
    expo = d * r * n * n - rn * (rn - 1) / 2 + (rn - k) * (rn - k - 1) / 2
    logw = rn * log_ratio + expo * math.log(q) - lq[k] - lq[rn - k]
    return sign * (-1.0) ** k * np.exp(logw)


def lambda_dqr_n(base: QBase, f, x: float, n: int):
    """``(Lambda_{q^delta}^{-1} D_q^r)^n f(x)`` as one ``(rn+1)``-point sum:

    ``Q^(-delta C(n,2)) q^(-C(rn,2)) / ((1-q)^(rn) (q^(-delta n) x)^(rn))
    * sum_k (-1)^k [rn,k]_q q^(C(rn-k,2)) f(q^(k - delta n) x)``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return f(x)
    if x == 0:
        raise DomainError("(Lambda^-1 D^r)^n f is a difference quotient; x = 0 is excluded")
    q, r, d = base.q, base.r, base.delta
    rn = r * n
    k = np.arange(rn + 1)
    lq = _log_qq(q, rn + 1)
    logc = (-(d * r * n * (n - 1) / 2) - rn * (rn - 1) / 2 + (rn - k) * (rn - k - 1) / 2) * math.log(q) \
        - rn * math.log(1 - q) - rn * (math.log(abs(x)) - d * n * math.log(q)) \
        + lq[rn] - lq[k] - lq[rn - k]
    sign = (1.0 if x > 0 else (-1.0) ** rn) * (-1.0) ** k
    pts = q ** (k - d * n) * x
    return float(np.sum(sign * np.exp(logc) * np.asarray(f(pts))))


def lambda_dqr_n_composed(base: QBase, f, x: float, n: int):
    """Reference: ``n``-fold composition of ``Lambda^{-1} D_q^r`` via difference quotients."""
    from .qcalc import q_derivative_n

    g = f
    for _ in range(n):
        g = (lambda h: (lambda t: q_derivative_n(h, base.q ** (-base.delta) * np.asarray(t), base.q, base.r)))(g)
    return g(x)


# --- translation series --------------------------------------------------------------


def _sum_translation(weights_for, f, x: float, plan: TranslationPlan, full: bool, what: str):
    """Shared truncation loop.  ``weights_for(n)`` gives ``(weights, points)``."""
    tol = plan.tol
    total = float(f(x))
    noise = _EPS * abs(total)
    last = [abs(total)]
    quiet = 0
    tail = 0.0
    for n in range(1, plan.n_max + 1):
        w, pts = weights_for(n)
        if w is None:
            break
        terms = w * np.asarray(f(pts), dtype=float)
        if not np.all(np.isfinite(terms)):
            tail = max(tail, noise)
            break
        term = float(terms.sum())
        term_noise = _EPS * float(np.sum(np.abs(terms)))
        if abs(term) <= plan.noise_factor * term_noise and term_noise > tol.abs_tol + tol.rel_tol * abs(total):
            # the stencil can no longer resolve this term; extrapolate the decay instead
            tail = _geometric_tail(last) + plan.noise_factor * term_noise
            break
        total += term
        noise += term_noise
        last.append(abs(term))
        if abs(term) <= tol.abs_tol + tol.rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                tail = _geometric_tail(last)
                break
        else:
            quiet = 0
    else:
        tail = _geometric_tail(last)
        if not _decaying(last):
            raise NonConvergence(f"{what} series is not decaying after {plan.n_max} terms")
    res = TranslationResult(total, len(last), tail, noise)
    return res if full else total


def _geometric_tail(mags: list[float]) -> float:
    a, b = (mags[-2], mags[-1]) if len(mags) >= 2 else (0.0, mags[-1])
    if a == 0:
        return b
    rho = b / a
    return b * rho / (1.0 - rho) if rho < 1 else b


def _decaying(mags: list[float]) -> bool:
    tail = mags[-4:]
    return len(tail) == 4 and all(b <= 0.1 * a or b == 0 for a, b in zip(tail, tail[1:]))


def translate_tau(base: QBase, f, x: float, y: float, plan: Optional[TranslationPlan] = None, *,
                  full: bool = False):
    """``tau_x f(y) = sum_n b_rn(y) (Lambda_{q^delta}^{-1} D_q^r)^n f(x)``.

    For ``f`` tagged ``parity="r-even"`` the translation is symmetric in
    ``(x, y)`` and the operator powers are taken at the larger of the two:
    the stencil weights grow like ``(y/x)^(rn)``, so this choice keeps the
    rounding noise of the sampled values small.
    """
    plan = plan or DEFAULT_PLAN
    f = as_lattice(f)
    if f.parity == "r-even" and abs(y) > abs(x):
        x, y = y, x  # symmetric for r-even f; the stencil is better conditioned at the larger point
    if y == 0:
        return TranslationResult(float(f(x)), 1, 0.0, 0.0) if full else float(f(x))
    if x == 0:
        raise DomainError("tau_x f(y) needs x != 0 (its operator powers are difference quotients at x)")
    q, d = base.q, base.delta
    log_ratio = math.log(abs(y / x))
    neg = (y / x) < 0

    def weights_for(n):
        rn = base.r * n
        w = _tau_weights(base, n, log_ratio, -1 if (neg and rn % 2) else 1)
        pts = x * q ** (np.arange(rn + 1) - d * n)
        return w, pts

    return _sum_translation(weights_for, f, x, plan, full, "tau translation")


@lru_cache(maxsize=256)
def _T_weights(q: float, r: int, delta: float, alpha: tuple, n: int) -> tuple[float, ...]:
    """``beta_j`` with ``b_{rn,alpha}(y) B^n f(x) = (y/x)^(rn) sum_j beta_j f(q^(j - n delta) x)``.

    ``beta^(n) = Q^(delta(n-1)) / d_rn * sum_i q^(delta r) p_i q^(-(i-delta) r (n-1)) beta^(n-1)`` shifted by ``i``.
    """
    if n == 0:
        return (1.0,)
    spec = BesselSpec.make(q, r, delta, alpha)
    p = B_stencil(spec)
    prev = np.asarray(_T_weights(q, r, delta, alpha, n - 1))
    Q = q**r
    scale = Q ** (delta * (n - 1)) / d_ratio(spec.base, spec.alpha, n)
    out = np.zeros(r * n + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        for i, pi in enumerate(p):
            c = scale * q ** (delta * r) * pi * q ** (-(i - delta) * r * (n - 1))
            out[i:i + len(prev)] += c * prev
    return tuple(out)


def translate_T_alpha(spec: BesselSpec, f, x: float, y: float, plan: Optional[TranslationPlan] = None, *,
                      full: bool = False):
    """``T^alpha_x f(y) = sum_n b_{rn,alpha}(y) B_{r,delta}^n f(x)``.

    ``T^alpha_0 f(y) = f(y)``; the operator powers act at ``x`` (at the
    larger argument when ``f`` is tagged r-even, using the symmetry).
    """
    plan = plan or DEFAULT_PLAN
    f = as_lattice(f)
    if f.parity == "r-even" and abs(y) > abs(x):
        x, y = y, x
    if x == 0:
        return TranslationResult(float(f(y)), 1, 0.0, 0.0) if full else float(f(y))
    if y == 0:
        return TranslationResult(float(f(x)), 1, 0.0, 0.0) if full else float(f(x))
    b = spec.base
    ratio = (y / x) ** b.r

    def weights_for(n):
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.asarray(_T_weights(b.q, b.r, float(b.delta), tuple(spec.alpha), n)) * ratio**n
        pts = x * b.q ** (np.arange(b.r * n + 1) - n * b.delta)
        return w, pts

    return _sum_translation(weights_for, f, x, plan, full, "T^alpha translation")


# --- finitely supported functions: exact translation of lattice atoms ------------------


def tau_atom(base: QBase, x: float, y: float, s: float, n_max: int = 200, tol: Tolerance = DEFAULT_TOL) -> float:
    """``tau_x e_s (y)`` for the lattice atom ``e_s`` (1 at ``s``, 0 elsewhere).

    Only stencil points hitting ``s`` contribute, so each term of the
    translation series is a single signed weight; no cancellation occurs
    inside a term.

    A function on the positive lattice is the restriction of its r-even
    extension, so the larger of ``x``, ``y`` goes in the operator slot; the
    series in ``(y/x)^{rn}`` then converges.
    """
    q, r, d = base.q, base.r, base.delta
    if abs(y) > abs(x):
        x, y = y, x
    if y == 0:
        return 1.0 if abs(x - s) <= 1e-12 * abs(s) else 0.0
    m = math.log(s / x) / math.log(q)  # s = q^m x
    log_ratio = math.log(abs(y / x))
    # first n whose stencil 0 <= m + d*n <= r*n can reach s
    n0 = max(0.0, -m / d)
    if m > 0:
        if r <= d:
            return 0.0
        n0 = max(n0, m / (r - d))
    total = 0.0
    quiet = 0
    for n in range(0, int(n0) + n_max + 1):
        kf = m + d * n
        k = round(kf)
        term = 0.0
        if abs(kf - k) < 1e-9 and 0 <= k <= r * n:
            if n == 0:
                term = 1.0
            else:
                rn = r * n
                lq = _log_qq(q, rn + 1)
                expo = d * r * n * n - rn * (rn - 1) / 2 + (rn - k) * (rn - k - 1) / 2
                logw = rn * log_ratio + expo * math.log(q) - lq[k] - lq[rn - k]
                sign = (-1.0) ** k * (1 if (y / x) > 0 or rn % 2 == 0 else -1)
                term = sign * math.exp(logw) if logw < 700 else math.inf
        total += term
        if n > n0 + 1 and abs(term) <= tol.abs_tol + tol.rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NonConvergence("atom translation series did not converge")


def _atoms(f: LatticeFunction, q: float):
    if f.support is None:
        raise DomainError("this operation needs a finitely supported LatticeFunction (from_atoms)")
    pts = np.array([q**k for k in f.support], dtype=float)
    return pts, np.asarray(f(pts), dtype=float)


def transpose_tau(base: QBase, f: LatticeFunction, x: float, y: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """``(^t tau_x f)(y)`` on the lattice, defined by duality:
    ``int (^t tau_x f) g d_q y = int f (tau_x g) d_q y`` for all lattice ``g``.

    For ``f`` supported at ``y_i`` this is
    ``sum_i y_i f(y_i) tau_x e_y (y_i) / y``.
    """
    if lattice_index(y, base.q) is None or y <= 0:
        raise DomainError("transpose_tau is defined on lattice points y = q^k")
    pts, vals = _atoms(f, base.q)
    acc = 0.0
    for yi, fi in zip(pts, vals):
        if fi != 0:
            acc += yi * fi * tau_atom(base, x, yi, y, tol=tol)
    return acc / y


def _tau_on(base: QBase, g, x: float, y: float, plan):
    g = as_lattice(g)
    if g.support is not None:
        pts, vals = _atoms(g, base.q)
        return sum(v * tau_atom(base, x, y, s) for s, v in zip(pts, vals) if v != 0)
    return translate_tau(base, g, x, y, plan)


def convolve0(base: QBase, f, g, x: float, tol: Tolerance = DEFAULT_TOL,
              plan: Optional[TranslationPlan] = None, *, route: str = "tau") -> float:
    """``(f * g)(x) = int_0^inf f(y) tau_x g(y) d_q y``.

    ``route="transpose"`` evaluates ``int (^t tau_x f)(y) g(y) d_q y``
    instead (``f`` finitely supported, ``g`` finitely supported).
    """
    f = as_lattice(f)
    if route == "transpose":
        gg = as_lattice(g)
        pts, vals = _atoms(gg, base.q)
        return float(sum((1 - base.q) * s * v * transpose_tau(base, f, x, s, tol) for s, v in zip(pts, vals) if v))
    if route != "tau":
        raise ValueError(f"unknown route {route!r}")
    h = _masked_kernel(f, np.vectorize(lambda y: _tau_on(base, g, x, float(y), plan)))
    return jackson_0_inf(_with_meta(h, f), base.q, tol).value


def convolve_alpha(spec: BesselSpec, f, g, y: float, tol: Tolerance = DEFAULT_TOL,
                   plan: Optional[TranslationPlan] = None) -> float:
    """``(f *_alpha g)(y) = int_0^inf f(x) T^alpha_y g(x) d_q x``."""
    f = as_lattice(f)
    h = _masked_kernel(f, np.vectorize(lambda x: translate_T_alpha(spec, g, y, float(x), plan)))
    return jackson_0_inf(_with_meta(h, f), spec.base.q, tol).value
