"""Ratio-driven power-series summation shared by the special functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergence

# Terms must stay below the threshold this many times in a row.
_CONSECUTIVE = 3


@dataclass(frozen=True)
class TruncatedSeries:
    """A finite coefficient sequence ``c_0..c_N`` of a series in ``x**stride``.

    ``tail_bound`` is a majorant of the dropped terms at ``radius``.
    """

    coeffs: tuple
    stride: int
    truncation_order: int
    tail_bound: float
    radius: float

    def __call__(self, x):
        x = np.asarray(x)
        X = x**self.stride
        acc = np.zeros_like(X, dtype=np.result_type(X, complex if np.iscomplexobj(self.coeffs) else float))
        for c in reversed(self.coeffs):
            acc = acc * X + c
        return acc[()] if acc.ndim == 0 else acc


@dataclass(frozen=True)
class SeriesValue:
    value: object
    terms: int
    tail: float


def sum_ratio_series(first, ratio: Callable[[int], complex], X, *, abs_tol=1e-17,
                     rel_tol=1e-16, max_terms=5000, min_terms=1) -> SeriesValue:
    """Sum ``t_0 + t_1 + ...`` with ``t_{m+1} = t_m * ratio(m) * X``.

    ``X`` may be a scalar or an ndarray; the stopping test uses the worst
    entry.  Summation stops once the ratio has dropped below one and
    ``|t_m| <= abs_tol + rel_tol*|sum|`` held for three successive terms.
    The reported tail is the geometric majorant ``|t_m| rho / (1 - rho)``
    with ``rho`` the current ratio modulus, valid because every series used
    here has eventually decreasing ratios.
    """
    X = np.asarray(X)
    term = np.asarray(first) * np.ones_like(X)
    total = term.copy()
    quiet = 0
    m = 0
    while True:
        rho_c = ratio(m)
        with np.errstate(over="ignore", invalid="ignore"):  # overflow is reported below
            term = term * rho_c * X
            total = total + term
        m += 1
        rho = float(np.max(np.abs(rho_c * X))) if X.size else 0.0
        mag = float(np.max(np.abs(term))) if X.size else 0.0
        scale = abs_tol + rel_tol * float(np.max(np.abs(total))) if X.size else abs_tol
        if not np.isfinite(mag):
            raise NonConvergence(f"series overflowed after {m} terms")
        if mag == 0.0 and m >= min_terms and np.all(rho_c * X == 0):
            # a vanishing ratio terminates the series exactly
            value = total[()] if total.ndim == 0 else total
            return SeriesValue(value, m, 0.0)
        if m >= min_terms and rho < 1.0 and mag <= scale:
            quiet += 1
            if quiet >= _CONSECUTIVE:
                tail = mag * rho / (1.0 - rho)
                value = total[()] if total.ndim == 0 else total
                return SeriesValue(value, m + 1, tail)
        else:
            quiet = 0
        if m >= max_terms:
            raise NonConvergence(f"series did not converge within {max_terms} terms")
