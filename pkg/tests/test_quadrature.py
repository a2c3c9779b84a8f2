import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmcar.errors import QuadratureError
from qmcar.quadrature import cumulative_integral, integrate, simpson_intervals


def test_polynomial_is_exact():
    assert integrate(lambda x: 3 * x**2, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_sine_to_tolerance():
    assert abs(integrate(np.sin, 0.0, math.pi) - 2.0) <= 1e-12


def test_reversed_limits_flip_sign():
    assert integrate(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1.0), abs=1e-12)


def test_breakpoint_kink():
    f = lambda x: np.abs(x - 1 / 3)
    exact = 0.5 * (1 / 9 + 4 / 9)
    assert abs(integrate(f, 0.0, 1.0, breakpoints=[1 / 3]) - exact) <= 1e-14


def test_fractional_power_near_zero():
    # x**2.5 has an unbounded fourth derivative at 0
    assert abs(integrate(lambda x: x**2.5, 0.0, 1.0) - 2 / 7) <= 1e-12


def test_depth_cap_raises():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.where(x < 0.3, 0.0, 1.0), 0.0, 1.0, tol=1e-14, max_depth=4)
    assert info.value.achieved > 1e-14


def test_zero_width_intervals():
    vals, err, capped = simpson_intervals(np.sin, [0.5, 0.2], [0.5, 0.2], 1e-12)
    assert vals.tolist() == [0.0, 0.0]
    assert not capped.any()


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40))
def test_cumulative_matches_closed_form(ts):
    t = np.array(ts)
    got = cumulative_integral(lambda x: np.cos(x), t)
    assert np.max(np.abs(got - np.sin(t))) <= 1e-12
