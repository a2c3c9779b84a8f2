import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmcar.density import (
    BUILTIN_NAMES,
    Density,
    cdf,
    check_curvature,
    default_bound,
    from_config,
    make_builtin,
)
from qmcar.errors import DomainError

# high-precision (mpmath, 40 digits) values
EXAMPLE1_C = 0.36139340070425743588
EXAMPLE1_MAX = 0.49951266648919179095
EXAMPLE2_C = float(Fraction(3947, 4860))
EXAMPLE2_AT_THIRD = 0.96604938271604938272


@pytest.fixture(scope="module", params=BUILTIN_NAMES)
def builtin(request):
    return make_builtin(request.param)


def test_uniform():
    d = make_builtin("uniform")
    assert d(0.3) == 1.0
    assert d.bound == 1.0
    assert d.norm == 1.0


def test_example1_norm_closed_form():
    d = make_builtin("example1")
    assert abs(d.norm - EXAMPLE1_C) <= 1e-15
    assert abs(d.norm - (3 / 16) * (8 / math.pi - 2 / 7 - 1 / 3)) <= 1e-15


def test_example1_norm_quadrature_agrees():
    d = make_builtin("example1")
    assert abs(d.cdf_quadrature(1.0) - EXAMPLE1_C) <= 1e-12


def test_example2_continuous_at_breakpoint():
    d = make_builtin("example2")
    left = d(math.nextafter(1 / 3, 0.0))
    right = d(Fraction(1, 3).__float__())
    assert abs(left - EXAMPLE2_AT_THIRD) <= 1e-15
    assert abs(right - EXAMPLE2_AT_THIRD) <= 1e-15


def test_example2_breakpoint_is_exact():
    d = make_builtin("example2")
    (b,) = d.breakpoints
    assert b == Fraction(1, 3)
    # float(1/3) lies just below 1/3, so it belongs to the first piece
    pp = d.func
    assert pp.piece_index(np.array([float(b)]))[0] == 0
    assert pp.piece_index(np.array([math.nextafter(float(b), 1.0)]))[0] == 1


def test_example2_norm():
    d = make_builtin("example2")
    assert abs(d.norm - EXAMPLE2_C) <= 1e-15


def test_unknown_name_lists_valid():
    with pytest.raises(DomainError, match="example1, example2, uniform"):
        make_builtin("nosuch")


@pytest.mark.parametrize(
    "name, t, expected",
    [("uniform", 0.3, 0.3), ("example1", 0.0, 0.0), ("example2", 0.0, 0.0), ("example1", 1.0, EXAMPLE1_C)],
)
def test_cdf_examples(name, t, expected):
    assert abs(cdf(make_builtin(name), t) - expected) <= 1e-12


@pytest.mark.parametrize("t", [-1e-9, 1.0 + 1e-9, 2.0])
def test_cdf_domain(t):
    with pytest.raises(DomainError):
        cdf(make_builtin("example1"), t)


def test_cdf_closed_form_vs_quadrature(builtin):
    t = np.random.default_rng(7).random(10_000)
    assert np.max(np.abs(builtin.cdf(t) - builtin.cdf_quadrature(t))) <= 1e-10


def test_cdf_endpoints(builtin):
    assert builtin.cdf(0.0) == 0.0
    assert builtin.cdf(1.0) == pytest.approx(builtin.norm, abs=1e-15)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_cdf_monotone(a, b):
    d = make_builtin("example2")
    lo, hi = min(a, b), max(a, b)
    assert d.cdf(lo) <= d.cdf(hi)


def test_default_bound_uniform():
    d = make_builtin("uniform")
    assert default_bound(d.func) == 1.0 + 1e-6


def test_default_bound_example1():
    d = make_builtin("example1")
    L = default_bound(d.func)
    assert EXAMPLE1_MAX * (1 + 1e-6) - 1e-10 <= L <= EXAMPLE1_MAX * (1 + 1e-6)
    grid = np.linspace(0, 1, 100_001)
    assert abs(grid[np.argmax(d(grid))] - 0.7) < 0.01


def test_default_bound_example2():
    d = make_builtin("example2")
    assert d.bound == pytest.approx(107 / 108 * (1 + 1e-6), rel=1e-15)


def test_bound_audit_random_points(builtin):
    x = np.random.default_rng(11).random(1_000_000)
    assert np.all(builtin(x) <= builtin.bound)


def test_invariants(builtin):
    assert 0 < builtin.norm <= builtin.bound
    grid = np.linspace(0, 1, 100_001)
    v = builtin(grid)
    assert v.min() >= 0 and v.max() <= builtin.bound
    g = builtin.cdf(grid)
    assert np.all(np.diff(g) >= 0)


def test_default_bound_rejects_nonfinite():
    with pytest.raises(DomainError), np.errstate(divide="ignore"):
        default_bound(lambda x: 1.0 / (x - 0.5))


def test_bound_below_max_rejected():
    with pytest.raises(DomainError):
        make_builtin("example1", bound=0.4)


def test_negative_density_rejected():
    with pytest.raises(DomainError):
        Density("neg", lambda x: np.asarray(x) - 0.5)


def test_quadrature_fallback_for_plain_callable():
    d = Density("cos", lambda x: np.cos(np.asarray(x)))
    assert abs(d.norm - math.sin(1.0)) <= 1e-12
    assert abs(d.cdf(0.4) - math.sin(0.4)) <= 1e-12


def test_curvature_example1_concave():
    rep = check_curvature(make_builtin("example1"))
    assert rep.classification == "strictly-concave"
    # analytic psi'' = (3/16)(-pi^2 sin(pi x/2) - (15/4) sqrt(x) - 2) <= -3/8
    assert rep.max_second_derivative < -0.375 + 1e-3


def test_curvature_uniform_vanishes():
    assert check_curvature(make_builtin("uniform")).classification == "mixed/vanishing"


def test_curvature_example2_is_concave():
    # both pieces have psi'' in [-9, -1/3]: -6x^2 - 1/3 and -9x^2
    rep = check_curvature(make_builtin("example2"))
    assert rep.classification == "strictly-concave"
    assert rep.max_second_derivative == pytest.approx(-1 / 3, abs=1e-3)
    assert rep.min_second_derivative == pytest.approx(-9.0, abs=1e-2)


def test_curvature_convex_and_mixed():
    convex = Density("exp", lambda x: np.exp(np.asarray(x)))
    assert check_curvature(convex).classification == "strictly-convex"
    wave = Density("wave", lambda x: 1.5 + np.sin(6 * np.asarray(x)))
    assert check_curvature(wave).classification == "mixed/vanishing"


def test_curvature_preconditions():
    d = make_builtin("example1")
    with pytest.raises(DomainError):
        check_curvature(d, grid=50)
    with pytest.raises(DomainError):
        check_curvature(d, tol=0.0)


def test_scaled_density_keeps_distribution():
    d = make_builtin("example1")
    s = d.scaled(7.0)
    t = np.linspace(0, 1, 101)
    assert np.allclose(s.cdf(t) / s.norm, d.cdf(t) / d.norm, rtol=0, atol=1e-15)


def test_config_forms_reproduce_builtins():
    e1 = from_config(
        {
            "kind": "sine-poly",
            "name": "e1",
            "scale": "3/16",
            "amplitude": 4,
            "frequency_pi": "1/2",
            "terms": [[-1, 2.5], [-1, 2]],
        }
    )
    e2 = from_config(
        json.loads(
            """{"kind": "piecewise-polynomial", "name": "e2", "pieces": [
            {"interval": [0, "1/3"], "coefficients": ["107/108", 0, "-1/6", 0, "-1/2"]},
            {"interval": ["1/3", 1], "coefficients": [1, "-2/27", 0, 0, "-3/4"]}]}"""
        )
    )
    x = np.linspace(0, 1, 1001)
    assert np.max(np.abs(e1(x) - make_builtin("example1")(x))) <= 1e-15
    assert np.max(np.abs(e2(x) - make_builtin("example2")(x))) <= 1e-15
    assert e2.norm == make_builtin("example2").norm


@pytest.mark.parametrize(
    "cfg",
    [
        {"kind": "nosuch"},
        {"kind": "sine-poly", "amplitude": 1, "terms": []},
        {"kind": "sine-poly", "amplitude": 1, "frequency": 1, "frequency_pi": 1},
        {"kind": "piecewise-polynomial", "pieces": [{"interval": [0, 0.5], "coefficients": [1]}]},
        {"kind": "piecewise-polynomial", "pieces": [{"interval": [0, "a/b"], "coefficients": [1]}]},
        42,
    ],
)
def test_bad_configs(cfg):
    with pytest.raises(DomainError):
        from_config(cfg)
