import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melnlab.series import Jet, jet_atan, jet_cos, jet_exp, jet_log, jet_sin, jet_sqrt

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
positive = st.floats(min_value=0.2, max_value=3.0, allow_nan=False)
coeff_lists = st.lists(finite, min_size=1, max_size=6)


def test_exp_series_coefficients():
    x = Jet.variable(0.3, 6)
    e = jet_exp(x)
    for m in range(7):
        assert e.coefficient(m) == pytest.approx(math.exp(0.3) / math.factorial(m), rel=1e-14)


def test_log_inverts_exp():
    x = Jet.variable(0.7, 5)
    back = jet_log(jet_exp(x))
    assert back.coefficient(0) == pytest.approx(0.7, abs=1e-14)
    assert back.coefficient(1) == pytest.approx(1.0, abs=1e-13)
    for m in range(2, 6):
        assert back.coefficient(m) == pytest.approx(0.0, abs=1e-12)


def test_sin_cos_pythagoras():
    u = Jet.variable(1.1, 6)
    s, c = jet_sin(u), jet_cos(u)
    one = s * s + c * c
    assert one.coefficient(0) == pytest.approx(1.0, abs=1e-14)
    for m in range(1, 7):
        assert one.coefficient(m) == pytest.approx(0.0, abs=1e-13)


def test_atan_derivatives_match_finite_differences():
    x0, h = 0.8, 1e-5
    jet = jet_atan(Jet.variable(x0, 3) ** 2)

    def f(x):
        return math.atan(x * x)

    fd1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
    fd2 = (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h**2
    assert jet.derivative(1) == pytest.approx(fd1, rel=1e-8)
    assert jet.derivative(2) == pytest.approx(fd2, rel=1e-4)


def test_real_power_and_sqrt():
    x = Jet.variable(2.0, 4)
    p = x.power(2.5)
    assert p.value == pytest.approx(2.0**2.5, rel=1e-15)
    assert p.derivative(1) == pytest.approx(2.5 * 2.0**1.5, rel=1e-14)
    s = jet_sqrt(x)
    assert (s * s).coefficient(1) == pytest.approx(1.0, abs=1e-14)


def test_ndarray_coefficients_and_priority():
    theta = np.linspace(0.0, 1.0, 7)
    r = Jet.variable(1.5, 2)
    left = r * np.sin(theta)
    right = np.sin(theta) * r  # ndarray.__mul__ must defer to the jet
    assert isinstance(left, Jet) and isinstance(right, Jet)
    np.testing.assert_allclose(left.coefficient(1), right.coefficient(1))


def test_compose_requires_zero_constant_term():
    g = jet_sin(Jet.variable(0.4, 4))
    with pytest.raises(ValueError):
        g.compose(Jet([0.1, 1.0], order=4))


@given(coeff_lists)
@settings(max_examples=60, deadline=None)
def test_compose_with_identity_is_identity(coeffs):
    g = Jet(coeffs)
    ident = Jet([0.0, 1.0], order=g.order)
    h = g.compose(ident)
    for m in range(g.order + 1):
        assert h.coefficient(m) == pytest.approx(g.coefficient(m), abs=1e-12)


@given(coeff_lists, coeff_lists)
@settings(max_examples=60, deadline=None)
def test_product_division_roundtrip(fc, gc):
    g = Jet(gc)
    if abs(g.coefficient(0)) < 0.1:
        g = g + 1.0
    f = Jet(fc, order=g.order)
    back = (f * g) / g
    scale = max(1.0, max(abs(c) for c in fc))
    for m in range(back.order + 1):
        assert back.coefficient(m) == pytest.approx(f.coefficient(m), abs=1e-9 * scale)


@given(coeff_lists, coeff_lists)
@settings(max_examples=60, deadline=None)
def test_leibniz_rule(fc, gc):
    f, g = Jet(fc), Jet(gc)
    n = min(f.order, g.order)
    f, g = f.truncate(n), g.truncate(n)
    lhs = (f * g).deriv()
    rhs = f.deriv() * g.truncate(max(n - 1, 0)) + f.truncate(max(n - 1, 0)) * g.deriv()
    scale = max(1.0, max(abs(c) for c in fc), max(abs(c) for c in gc)) ** 2
    for m in range(max(n - 1, 0) + 1):
        assert lhs.coefficient(m) == pytest.approx(rhs.coefficient(m), abs=1e-10 * scale)


def test_nested_jets_cross_derivative():
    # t-jet whose coefficients are r-jets: f(t, r) = cos(t + r) about (0, 0.2)
    t_order, r_order = 3, 2
    r_jet = Jet.variable(0.2, r_order)
    f = jet_cos(Jet([r_jet, Jet.constant(1.0, r_order)], order=t_order))
    d_dt_dr = f.coefficient(1).derivative(1)
    assert d_dt_dr == pytest.approx(-math.cos(0.2), rel=1e-12)
