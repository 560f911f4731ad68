import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from higher_qbessel import NonConvergence
from higher_qbessel._series import TruncatedSeries, sum_ratio_series


@given(x=st.floats(-20.0, 20.0))
def test_exponential(x):
    sv = sum_ratio_series(1.0, lambda m: 1.0 / (m + 1), x)
    # alternating for x < 0: cancellation of size eps * e^|x|
    assert sv.value == pytest.approx(math.exp(x), rel=1e-13, abs=1e-15 * math.exp(abs(x)))


@given(x=st.floats(-0.9, 0.9))
def test_tail_bounds_geometric_error(x):
    sv = sum_ratio_series(1.0, lambda m: 1.0, x, abs_tol=1e-8, rel_tol=0.0)
    assert abs(sv.value - 1 / (1 - x)) <= sv.tail + 1e-14 * abs(sv.value)


def test_vectorized():
    xs = np.array([0.0, 0.5, -1.0])
    sv = sum_ratio_series(1.0, lambda m: 1.0 / (m + 1), xs)
    assert np.allclose(sv.value, np.exp(xs), rtol=1e-14)


def test_terminating_series_stops_exactly():
    # (1 + x)^3 as a hypergeometric series: ratio (m - 3)/(m + 1) * (-1)
    sv = sum_ratio_series(1.0, lambda m: -(m - 3) / (m + 1), 5.0)
    assert sv.value == 216.0
    assert sv.tail == 0.0


def test_divergent_series_raises():
    with pytest.raises(NonConvergence):
        sum_ratio_series(1.0, lambda m: 1.0, 2.0, max_terms=200)
    with pytest.raises(NonConvergence):
        sum_ratio_series(1.0, lambda m: m + 1.0, 10.0)


def test_truncated_series_horner():
    ts = TruncatedSeries((1.0, -0.5, 0.25), 2, 2, 0.0, 1.0)
    assert ts(2.0) == pytest.approx(1 - 0.5 * 4 + 0.25 * 16)
