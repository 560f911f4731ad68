"""q-arithmetic primitives.

q-numbers, q-Pochhammer symbols, q-factorials, Gaussian binomials, the
q-Gamma and q-Beta functions, and the normalizers ``alpha_{rn,alpha,q}`` of
the higher-order q-Bessel series.  Everything here is double precision; the
infinite products are truncated once the running factor is within the
tolerance of one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import DivisionByZero, DomainError, NonConvergence, PoleError

__all__ = [
    "QBase",
    "AlphaVector",
    "Tolerance",
    "DEFAULT_TOL",
    "q_number",
    "q_pochhammer",
    "q_pochhammer_inf",
    "q_rising",
    "q_shifted_power",
    "q_shifted_power_real",
    "q_factorial",
    "q_binomial_coeff",
    "q_gamma",
    "log_q_gamma",
    "q_beta",
    "alpha_norm",
    "log_alpha_norm",
    "d_ratio",
    "gamma_ratio",
]


@dataclass(frozen=True)
class QBase:
    """The parameter bundle ``(q, r, delta)`` every computation depends on."""

    q: float
    r: int = 2
    delta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"q must satisfy 0 < q < 1, got q={self.q!r}")
        if int(self.r) != self.r or self.r < 2:
            raise DomainError(f"r must be an integer >= 2, got r={self.r!r}")
        if not self.delta > 0:
            raise DomainError(f"delta must be > 0, got delta={self.delta!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def Q(self) -> float:
        """The base ``q**r`` of the Bessel-type series."""
        return self.q**self.r

    @property
    def rq(self) -> float:
        """``(r)_q = 1 + q + ... + q^(r-1)``."""
        return q_number(self.r, self.q)

    def with_delta(self, delta: float) -> "QBase":
        return QBase(self.q, self.r, delta)


@dataclass(frozen=True)
class AlphaVector:
    """The multi-index ``(alpha_1, ..., alpha_{r-1})``.

    ``alpha_k >= -1 + k/r`` is enforced on construction.  The integral
    representations need the open condition; see :meth:`check_strict`.
    """

    alpha: tuple[float, ...]

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if not alpha:
            raise DomainError("alpha must have at least one component (r >= 2)")
        r = len(alpha) + 1
        for k, a in enumerate(alpha, start=1):
            if a < -1.0 + k / r - 1e-12:
                raise DomainError(f"alpha[{k}] < -1 + {k}/r (alpha[{k}]={a}, r={r})")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def collapse(cls, r: int) -> "AlphaVector":
        """The multiset ``{-1/r, ..., -(r-1)/r}`` for which ``j_alpha = cos_r``.

        Ordered as ``alpha_k = -1 + k/r`` so that it sits on the boundary of
        the admissible region; ``j_alpha`` is symmetric in the entries.
        """
        return cls(tuple(-1.0 + k / r for k in range(1, r)))

    @property
    def r(self) -> int:
        return len(self.alpha) + 1

    @property
    def abs_alpha(self) -> float:
        return math.fsum(self.alpha)

    def shifted(self, p: Sequence[float]) -> "AlphaVector":
        if len(p) != len(self.alpha):
            raise DomainError("shift must have r-1 components")
        return AlphaVector(tuple(a + s for a, s in zip(self.alpha, p)))

    def check_strict(self) -> None:
        r = self.r
        for k, a in enumerate(self.alpha, start=1):
            if a <= -1.0 + k / r + 1e-12:
                raise DomainError(
                    f"alpha[{k}] must be > -1 + {k}/r for the integral representation"
                )

    def __iter__(self):
        return iter(self.alpha)

    def __len__(self):
        return len(self.alpha)

    def __getitem__(self, i):
        return self.alpha[i]


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-16
    rel_tol: float = 1e-15
    max_terms: int = 10_000

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise DomainError("at least one of abs_tol, rel_tol must be positive")
        if self.max_terms <= 0:
            raise DomainError("max_terms must be positive")


DEFAULT_TOL = Tolerance()


def _check_q(q: float) -> None:
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must satisfy 0 < q < 1, got q={q!r}")


def q_number(lam, q: float):
    """``(lambda)_q = (1 - q**lambda) / (1 - q)``."""
    _check_q(q)
    return (1.0 - q**lam) / (1.0 - q)


def q_pochhammer_inf(a, q: float, tol: Tolerance = DEFAULT_TOL):
    """``(a; q)_inf`` and the number of factors used.

    Factors are multiplied until ``|a q^k| < tol.abs_tol``.
    """
    _check_q(q)
    prod = 1.0
    x = a
    for k in range(tol.max_terms):
        if abs(x) < tol.abs_tol:
            return prod, k
        prod *= 1.0 - x
        x *= q
    raise NonConvergence(f"(a;q)_inf did not converge in {tol.max_terms} factors")


def q_pochhammer(a, q: float, n=math.inf, tol: Tolerance = DEFAULT_TOL):
    """``(a; q)_n = (1-a)(1-aq)...(1-aq^(n-1))``; ``n`` may be ``math.inf``."""
    if n == math.inf:
        return q_pochhammer_inf(a, q, tol)[0]
    _check_q(q)
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0 or infinite")
    prod = 1.0
    x = a
    for _ in range(n):
        prod *= 1.0 - x
        x *= q
    return prod


def q_rising(lam, n: int, q: float):
    """``(lambda)_n^q = (q^lambda; q)_n / (1-q)^n = prod_{j<n} (lambda+j)_q``."""
    _check_q(q)
    prod = 1.0
    for j in range(int(n)):
        prod *= q_number(lam + j, q)
    return prod


def q_shifted_power(a, b, q: float, n=math.inf, tol: Tolerance = DEFAULT_TOL):
    """``(a + b)_q^n = prod_{j=0}^{n-1} (a + q^j b)`` (``n`` may be infinite)."""
    _check_q(q)
    if n == math.inf:
        if a == 1:
            return q_pochhammer_inf(-b, q, tol)[0]
        if a == 0:
            raise NonConvergence("(0 + b)_q^inf has no convergent product")
        # a^inf only converges for a == 1
        raise NonConvergence("(a + b)_q^inf requires a == 1")
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    prod = 1.0
    for j in range(n):
        prod *= a + q**j * b
    return prod


def q_shifted_power_real(a, t, q: float, tol: Tolerance = DEFAULT_TOL):
    """``(1 + a)_q^t = (1 + a)_q^inf / (1 + q^t a)_q^inf`` for real ``t``."""
    num = q_pochhammer_inf(-a, q, tol)[0]
    den = 1.0
    x = -(q**t) * a
    for _ in range(tol.max_terms):
        if abs(x) < tol.abs_tol:
            break
        f = 1.0 - x
        if f == 0.0:
            raise DivisionByZero(f"(1 + q^t a)_q^inf vanishes (t={t}, a={a})")
        den *= f
        x *= q
    else:
        raise NonConvergence("denominator product did not converge")
    return num / den


def q_factorial(n: int, q: float) -> float:
    """``[n]_q! = (q;q)_n / (1-q)^n``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    return _factorial_table(q, int(n) + 1)[int(n)]


@lru_cache(maxsize=256)
def _factorial_table_exact(q: float, size: int) -> tuple[float, ...]:
    out = [1.0]
    for m in range(1, size):
        out.append(out[-1] * q_number(m, q))
    return tuple(out)


def _factorial_table(q: float, size: int) -> tuple[float, ...]:
    # Round sizes up so that the cache is shared between nearby requests.
    return _factorial_table_exact(q, max(32, 1 << (size - 1).bit_length()))


def q_binomial_coeff(n: int, k: int, q: float) -> float:
    """Gaussian binomial ``[n over k]_q``."""
    if k < 0 or k > n:
        raise DomainError(f"q-binomial needs 0 <= k <= n (n={n}, k={k})")
    # (q;q)_n / ((q;q)_k (q;q)_{n-k}) without the (1-q) powers, which cancel.
    num = 1.0
    for j in range(k):
        num *= (1.0 - q ** (n - j)) / (1.0 - q ** (j + 1))
    return num


def _q_terms(q: float, eps: float = 1e-17) -> int:
    return int(math.ceil(math.log(eps) / math.log(q))) + 1


def log_q_gamma(t: float, q: float) -> float:
    """``log Gamma_q(t)`` for ``t > 0``.

    Uses ``Gamma_q(t) = (q;q)_inf / (q^t;q)_inf * (1-q)^(1-t)``, summing the
    paired logarithms so that nothing overflows for large ``t``.
    """
    _check_q(q)
    if t <= 0:
        raise PoleError("log_q_gamma requires t > 0")
    n = _q_terms(q)
    logs = []
    qj = q
    qt = q**t
    for _ in range(n):
        logs.append(math.log1p(-qj) - math.log1p(-qt))
        qj *= q
        qt *= q
    return math.fsum(logs) + (1.0 - t) * math.log1p(-q)


def q_gamma(t: float, q: float) -> float:
    """``Gamma_q(t) = (1-q)_q^(t-1) / (1-q)^(t-1)``.

    Positive ``t`` goes through :func:`log_q_gamma`.  Negative non-integer
    ``t`` is evaluated from the product directly; nonpositive integers are
    poles.
    """
    _check_q(q)
    if t > 0:
        return math.exp(log_q_gamma(t, q))
    if float(t).is_integer():
        raise PoleError(f"Gamma_q has a pole at t={t}")
    # Gamma_q(t) = Gamma_q(t + m) / prod_{j<m} (t + j)_q with t + m > 0
    m = int(math.floor(-t)) + 1
    denom = 1.0
    for j in range(m):
        denom *= q_number(t + j, q)
    return q_gamma(t + m, q) / denom


def q_beta(t: float, s: float, q: float) -> float:
    """``beta_q(t, s) = Gamma_q(t) Gamma_q(s) / Gamma_q(t + s)``."""
    if t <= 0 or s <= 0:
        raise PoleError("q_beta requires t > 0 and s > 0")
    return math.exp(log_q_gamma(t, q) + log_q_gamma(s, q) - log_q_gamma(t + s, q))


def gamma_ratio(a: float, n: int, q: float) -> float:
    """``Gamma_q(a + n) / Gamma_q(a) = (a)_n^q`` for integer ``n >= 0``."""
    return q_rising(a, n, q)


@lru_cache(maxsize=512)
def _norm_table_exact(q: float, r: int, alpha: tuple[float, ...], size: int):
    """Products ``alpha_{rn}`` and their logarithms for ``n < size``."""
    Q = q**r
    rq_r = q_number(r, q) ** r
    vals = [1.0]
    logs = [0.0]
    for n in range(1, size):
        # d_{rn} = (r)_q^r (n)_Q prod_i (alpha_i + n)_Q
        d = rq_r * q_number(n, Q)
        for a in alpha:
            v = q_number(a + n, Q)
            if v <= 0:
                raise DomainError(f"alpha_norm undefined: (alpha_i + {n})_Q <= 0")
            d *= v
        vals.append(vals[-1] * d)
        logs.append(logs[-1] + math.log(d))
    return tuple(vals), tuple(logs)


def _norm_table(q: float, r: int, alpha: tuple[float, ...], n: int):
    size = max(64, 1 << n.bit_length())
    return _norm_table_exact(float(q), int(r), tuple(alpha), size)


def _alpha_tuple(alpha) -> tuple[float, ...]:
    return tuple(alpha.alpha) if isinstance(alpha, AlphaVector) else tuple(map(float, alpha))


def _checked_alpha(base: QBase, alpha, n: int) -> tuple[float, ...]:
    if n < 0:
        raise DomainError("n must be >= 0")
    a = _alpha_tuple(alpha)
    if len(a) != base.r - 1:
        raise DomainError(f"alpha needs r-1={base.r - 1} components, got {len(a)}")
    return a


def log_alpha_norm(base: QBase, alpha, n: int) -> float:
    """``log alpha_{rn,alpha,q}``."""
    a = _checked_alpha(base, alpha, n)
    return _norm_table(base.q, base.r, a, n)[1][n]


def alpha_norm(base: QBase, alpha, n: int) -> float:
    """``alpha_{rn,alpha,q} = (r)_q^{rn} [n]_{q^r}! prod_i Gamma_{q^r}(alpha_i+n+1)/Gamma_{q^r}(alpha_i+1)``.

    Built from the cached recurrence ``alpha_{rn} = alpha_{r(n-1)} d_{rn}``;
    overflows to ``inf`` for very large ``n`` (use :func:`log_alpha_norm`).
    """
    a = _checked_alpha(base, alpha, n)
    return _norm_table(base.q, base.r, a, n)[0][n]


def d_ratio(base: QBase, alpha, n: int) -> float:
    """``d_{rn,alpha,q} = alpha_{rn,alpha,q} / alpha_{r(n-1),alpha,q}`` for ``n >= 1``."""
    if n < 1:
        raise DomainError("d_ratio needs n >= 1")
    a = _alpha_tuple(alpha)
    d = base.rq**base.r * q_number(n, base.Q)
    for ai in a:
        d *= q_number(ai + n, base.Q)
    return d
