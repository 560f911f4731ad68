"""q-difference and Jackson q-integral calculus on the geometric lattice.

Functions are plain callables or :class:`LatticeFunction` wrappers.  Every
integrator returns an :class:`IntegrationReport`; the lattice walk stops on
a geometric tail majorant rather than a fixed window unless the caller pins
one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DomainError, NonConvergence
from .qcore import DEFAULT_TOL, Tolerance, q_binomial_coeff

__all__ = [
    "LatticeFunction",
    "IntegrationReport",
    "as_lattice",
    "lattice_index",
    "q_derivative",
    "q_derivative_n",
    "q_leibniz",
    "shift",
    "jackson_0_a",
    "jackson_aq_inf",
    "jackson_0_inf",
    "jackson_multi",
    "jackson_generic",
]

_BLOCK = 32


def lattice_index(x: float, q: float, rtol: float = 1e-9) -> Optional[int]:
    """``k`` with ``x == q**k`` (to ``rtol``), or ``None`` off the lattice."""
    if x <= 0:
        return None
    k = round(math.log(x) / math.log(q))
    return k if abs(q**k - x) <= rtol * x else None


@dataclass(frozen=True)
class LatticeFunction:
    """A function sampled on ``R_{q,+} = {q^k}``.

    ``window`` pins the exponent range used by the improper integrators
    (``None`` lets them walk until the tail bound is met).  ``support`` lists
    the exponents of a finitely supported function; integrals then reduce to
    exact finite sums.  ``parity`` is ``"none"``, ``"r-even"`` or
    ``"r-odd"`` (with ``parity_order`` = l).
    """

    eval: Callable
    window: Optional[tuple[int, int]] = None
    parity: str = "none"
    parity_order: int = 0
    support: Optional[tuple[int, ...]] = None
    q: Optional[float] = None

    def __post_init__(self):
        if self.window is not None and self.window[0] > self.window[1]:
            raise DomainError(f"window {self.window} has k_min > k_max")
        if self.parity not in ("none", "r-even", "r-odd"):
            raise DomainError(f"unknown parity tag {self.parity!r}")
        if self.support is not None and self.q is None:
            raise DomainError("a finitely supported function needs its lattice base q")

    def __call__(self, x):
        return self.eval(x)

    @classmethod
    def from_atoms(cls, atoms: Mapping[int, complex], q: float) -> "LatticeFunction":
        """Finitely supported function with value ``atoms[k]`` at ``q**k``."""
        table = {int(k): v for k, v in atoms.items()}

        def f(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros(x.shape, dtype=np.result_type(*table.values(), float) if table else float)
            flat_x, flat_out = x.reshape(-1), out.reshape(-1)
            for i, xi in enumerate(flat_x):
                k = lattice_index(float(xi), q)
                if k is not None and k in table:
                    flat_out[i] = table[k]
            return out[()] if out.ndim == 0 else out

        return cls(f, parity="none", support=tuple(sorted(table)), q=q)

    def check_parity(self, r: int, samples, atol: float = 1e-12) -> bool:
        """Check the declared r-parity at complex sample points."""
        if self.parity == "none":
            return True
        w = np.exp(2j * np.pi * np.arange(r) / r)
        for x in samples:
            base = self.eval(x)
            for wk in w:
                if self.parity == "r-even":
                    other = self.eval(wk * x)
                else:
                    other = wk**self.parity_order * self.eval(wk * x)
                if abs(other - base) > atol * max(1.0, abs(base)):
                    return False
        return True


@dataclass(frozen=True)
class IntegrationReport:
    value: complex
    terms_used: int
    tail_estimate: float


def as_lattice(f) -> LatticeFunction:
    return f if isinstance(f, LatticeFunction) else LatticeFunction(f)


def _eval_many(f, xs: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array, falling back to a scalar loop."""
    try:
        out = np.asarray(f(xs))
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([f(float(x)) for x in xs])


def _nonzero_x(x):
    if np.any(np.asarray(x) == 0):
        raise DomainError("q-difference quotient is undefined at x = 0; use the series form")


# --- q-derivatives ---------------------------------------------------------


def q_derivative(f, x, q: float):
    """``D_q f(x) = (f(qx) - f(x)) / ((q-1)x)``."""
    _nonzero_x(x)
    x = np.asarray(x)
    return (f(q * x) - f(x)) / ((q - 1.0) * x)


def q_derivative_n(f, x, q: float, n: int):
    """``D_q^n f(x)`` through the closed ``(n+1)``-point stencil."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return f(x)
    _nonzero_x(x)
    x = np.asarray(x)
    acc = 0
    for k in range(n + 1):
        c = (-1) ** k * q_binomial_coeff(n, k, q) * q ** ((n - k) * (n - k - 1) / 2)
        acc = acc + c * f(q**k * x)
    return q ** (-n * (n - 1) / 2) / (x**n * (1.0 - q) ** n) * acc


def q_leibniz(f, g, x, q: float, n: int):
    """``D_q^n (fg)(x) = sum_k [n,k]_q (D_q^(n-k) f)(q^k x) (D_q^k g)(x)``."""
    _nonzero_x(x)
    x = np.asarray(x)
    acc = 0
    for k in range(n + 1):
        acc = acc + q_binomial_coeff(n, k, q) * q_derivative_n(f, q**k * x, q, n - k) * q_derivative_n(
            g, x, q, k
        )
    return acc


def shift(f, x, q: float, delta: float = 1.0, direction: str = "forward"):
    """``Lambda_{q^delta} f(x) = f(q^delta x)``; ``direction="inverse"`` gives ``f(q^-delta x)``."""
    if direction == "forward":
        return f(q**delta * np.asarray(x))
    if direction == "inverse":
        return f(q ** (-delta) * np.asarray(x))
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")


# --- Jackson integrals -----------------------------------------------------


def _accept(total, tail, tol: Tolerance) -> bool:
    return tail <= tol.abs_tol + tol.rel_tol * abs(total)


def _walk(f, start: float, step: float, q: float, tol: Tolerance, limit: Optional[int]):
    """Sum ``(1-q) x_j f(x_j)`` over ``x_j = start * step**j``, ``j >= 0``.

    Works in blocks; the tail after a block is the geometric majorant
    ``m rho/(1-rho)`` with ``m`` the last block's largest term and ``rho``
    the per-term decay observed between consecutive block maxima.
    """
    total = 0.0
    used = 0
    prev_max = None
    cap = tol.max_terms if limit is None else limit
    while used < cap:
        n = min(_BLOCK, cap - used)
        xs = start * step ** np.arange(used, used + n, dtype=float)
        if not np.all(np.isfinite(xs)) or np.any(xs == 0):
            break
        terms = (1.0 - q) * xs * _eval_many(f, xs)
        if not np.all(np.isfinite(terms)):
            raise NonConvergence(f"integrand is not finite near x = {xs[-1]:.3g}")
        total = total + terms.sum()
        used += n
        cur_max = float(np.max(np.abs(terms)))
        if cur_max == 0.0 and (prev_max is None or prev_max == 0.0):
            if limit is None and used >= 4 * _BLOCK:
                return total, used, 0.0
        elif prev_max:
            rho = (cur_max / prev_max) ** (1.0 / n)
            if rho < 1.0:
                tail = cur_max * rho / (1.0 - rho)
                if limit is None and _accept(total, tail, tol):
                    return total, used, tail
        prev_max = cur_max
    if limit is not None:
        edge = float(np.max(np.abs(terms))) if used else 0.0
        rho = (edge / prev_max) ** (1.0 / _BLOCK) if prev_max else 0.0
        tail = edge * rho / (1.0 - rho) if rho < 1.0 else math.inf
        return total, used, tail
    raise NonConvergence(f"Jackson sum did not meet its tail bound within {cap} terms")


def _finite(f: LatticeFunction, q: float, keep: Callable[[int], bool]) -> IntegrationReport:
    if f.q is not None and abs(f.q - q) > 1e-15:
        raise DomainError(f"function lives on the q={f.q} lattice, integral uses q={q}")
    ks = [k for k in f.support if keep(k)]
    xs = np.array([q**k for k in ks], dtype=float)
    vals = _eval_many(f, xs) if ks else np.zeros(0)
    return IntegrationReport(complex((1.0 - q) * np.sum(xs * vals)) if np.iscomplexobj(vals)
                             else float((1.0 - q) * np.sum(xs * vals)), len(ks), 0.0)


def _report(total, used, tail, tol) -> IntegrationReport:
    if not _accept(total, tail, tol):
        raise NonConvergence(f"tail estimate {tail:.3g} exceeds tolerance after {used} terms")
    value = complex(total) if np.iscomplexobj(total) else float(total)
    return IntegrationReport(value, used, float(tail))


def jackson_0_a(f, a: float, q: float, tol: Tolerance = DEFAULT_TOL) -> IntegrationReport:
    """``int_0^a f d_q x = (1-q) sum_{j>=0} a q^j f(a q^j)``."""
    if a < 0:
        raise DomainError("jackson_0_a needs a >= 0")
    if a == 0:
        return IntegrationReport(0.0, 0, 0.0)
    f = as_lattice(f)
    if f.support is not None:
        k0 = lattice_index(a, q)
        if k0 is None:
            raise DomainError("a finitely supported function can only be integrated up to a lattice point")
        return _finite(f, q, lambda k: k >= k0)
    limit = None
    if f.window is not None:
        k0 = lattice_index(a, q)
        limit = max(0, f.window[1] - (k0 if k0 is not None else 0) + 1)
    return _report(*_walk(f, a, q, q, tol, limit), tol)


def jackson_aq_inf(f, a: float, q: float, tol: Tolerance = DEFAULT_TOL) -> IntegrationReport:
    """``int_{aq}^inf f d_q t = (1-q) sum_{k>=0} a q^-k f(a q^-k)``."""
    if a <= 0:
        raise DomainError("jackson_aq_inf needs a > 0")
    f = as_lattice(f)
    if f.support is not None:
        k0 = lattice_index(a, q)
        if k0 is None:
            raise DomainError("a finitely supported function needs a lattice endpoint")
        return _finite(f, q, lambda k: k <= k0)
    limit = None
    if f.window is not None:
        k0 = lattice_index(a, q)
        limit = max(0, (k0 if k0 is not None else 0) - f.window[0] + 1)
    return _report(*_walk(f, a, 1.0 / q, q, tol, limit), tol)


def jackson_0_inf(f, q: float, tol: Tolerance = DEFAULT_TOL) -> IntegrationReport:
    """``int_0^inf f d_q t = (1-q) sum_{k in Z} q^k f(q^k)``.

    The downward walk (``k >= 0``) and the upward walk (``k < 0``) are summed
    separately and in that order, so results are reproducible.
    """
    f = as_lattice(f)
    if f.support is not None:
        return _finite(f, q, lambda k: True)
    lower = jackson_0_a(f, 1.0, q, tol)
    upper = jackson_aq_inf(f, 1.0 / q, q, tol)
    return IntegrationReport(lower.value + upper.value, lower.terms_used + upper.terms_used,
                             lower.tail_estimate + upper.tail_estimate)


def _axis_terms(q: float, tol: Tolerance) -> int:
    return int(math.ceil(math.log(max(tol.abs_tol, 1e-300)) / math.log(q))) + 1


def jackson_multi(f, n: int, q: float, tol: Tolerance = DEFAULT_TOL, *, mode: str = "iterated",
                  terms: Optional[int] = None) -> IntegrationReport:
    """``int_[0,1]^n f d_q t_1 ... d_q t_n``.

    ``mode="iterated"`` sums ``(1-q)^n q^(i_1+...+i_n) f(q^i_1, ..., q^i_n)``
    over the product lattice; ``mode="diagonal"`` is the single-argument
    reading ``sum (1-q)^n q^m C(m+n-1, n-1) f(q^m)``.  ``f`` must accept
    numpy arrays (one per variable in iterated mode).
    """
    if n < 1:
        raise DomainError("need n >= 1 variables")
    N = terms or _axis_terms(q, tol)
    if mode == "diagonal":
        m = np.arange(0, N * n, dtype=float)
        mult = np.array([math.comb(int(k) + n - 1, n - 1) for k in m], dtype=float)
        terms_ = (1.0 - q) ** n * q**m * mult * _eval_many(f, q**m)
        tail = float(np.abs(terms_[-1])) * q / (1.0 - q)
        return _report(terms_.sum(), len(m), tail, tol)
    if mode != "iterated":
        raise ValueError(f"unknown mode {mode!r}")
    if N**n > 5_000_000:
        raise NonConvergence(f"iterated lattice of {N}^{n} points is too large; integrate axis by axis")
    axes = np.meshgrid(*([q ** np.arange(N, dtype=float)] * n), indexing="ij")
    weight = (1.0 - q) ** n * np.prod(axes, axis=0)
    vals = np.asarray(f(*axes))
    terms_ = weight * vals
    # shell where some index hits N-1: what the next layer would look like
    shell = np.zeros(terms_.shape, dtype=bool)
    for ax in range(n):
        idx = [slice(None)] * n
        idx[ax] = N - 1
        shell[tuple(idx)] = True
    tail = float(np.abs(terms_[shell]).sum()) * q / (1.0 - q)
    return _report(terms_.sum(), terms_.size, tail, tol)


def jackson_generic(f, a: float, b: float, q: float, tol: Tolerance = DEFAULT_TOL) -> IntegrationReport:
    """``int_a^b = int_0^b - int_0^a`` for ``0 <= a <= b``."""
    if not (0 <= a <= b):
        raise DomainError("jackson_generic needs 0 <= a <= b")
    if a == b:
        return IntegrationReport(0.0, 0, 0.0)
    hi = jackson_0_a(f, b, q, tol)
    lo = jackson_0_a(f, a, q, tol)
    return IntegrationReport(hi.value - lo.value, hi.terms_used + lo.terms_used,
                             hi.tail_estimate + lo.tail_estimate)
