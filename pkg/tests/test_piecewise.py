import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from oscilab.piecewise import (
    PiecewisePolynomial,
    as_polynomial,
    hermite_cubic,
    line,
    transported,
)


def test_as_polynomial_preserves_values():
    p = as_polynomial([1.0, 2.0, 3.0], 2.0, 5.0)
    x = np.linspace(2, 5, 7)
    assert np.allclose(p(x), 1 + 2 * x + 3 * x**2)


@given(ratio=st.floats(0.1, 10), u=st.floats(0.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_transport_composes(ratio, u):
    p = as_polynomial([0.5, -1.0, 2.0], 0.0, 3.0)
    q = transported(p, ratio)
    x = u * 3.0 / ratio
    assert q(x) == pytest.approx(p(x * ratio), rel=1e-12, abs=1e-12)


@given(
    y=st.tuples(*[st.floats(-5, 5)] * 4),
    x0=st.floats(-2, 2),
    h=st.floats(0.1, 3),
)
@settings(max_examples=100, deadline=None)
def test_hermite_cubic_interpolates(y, x0, h):
    y0, y1, d0, d1 = y
    x1 = x0 + h
    p = hermite_cubic(x0, x1, y0, y1, d0, d1)
    dp = p.deriv()
    assert p(x0) == pytest.approx(y0, abs=1e-10)
    assert p(x1) == pytest.approx(y1, abs=1e-10)
    assert dp(x0) == pytest.approx(d0, abs=1e-9)
    assert dp(x1) == pytest.approx(d1, abs=1e-9)


def test_line():
    p = line(1.0, 2.0, -3.0, 0.0, 4.0)
    assert p(0.0) == pytest.approx(5.0) and p(4.0) == pytest.approx(-7.0)


@pytest.fixture
def pw():
    return PiecewisePolynomial(
        np.array([0.0, 1.0, 3.0]),
        [Polynomial([0.0, 1.0]), Polynomial([2.0, -1.0, 0.0, 0.0])],
    )


def test_evaluation_and_break_convention(pw):
    assert pw(0.5) == 0.5
    assert pw(1.0) == pytest.approx(1.0)  # right piece: 2 - 1
    assert pw(2.5) == pytest.approx(-0.5)
    assert np.allclose(pw(np.array([[0.0, 3.0]])), [[0.0, -1.0]])
    assert pw.domain == (0.0, 3.0)


@pytest.mark.parametrize("bad", [-0.1, 3.1, np.nan])
def test_domain_errors(pw, bad):
    with pytest.raises(ValueError, match="outside"):
        pw(np.array([1.0, bad]))


def test_construction_errors():
    with pytest.raises(ValueError):
        PiecewisePolynomial(np.array([0.0, 1.0]), [Polynomial([1.0]), Polynomial([1.0])])
    with pytest.raises(ValueError):
        PiecewisePolynomial(np.array([1.0, 0.0]), [Polynomial([1.0])])


def test_derivative_and_antiderivative(pw):
    d = pw.deriv()
    assert d(0.5) == pytest.approx(1.0) and d(2.0) == pytest.approx(-1.0)
    F = pw.antiderivative()
    assert F(1.0) == pytest.approx(0.5)
    assert F(3.0) == pytest.approx(0.5 + (2 * 2 - 0.5 * (9 - 1)))
    G = pw.antiderivative(ref=1.0)
    assert G(1.0) == pytest.approx(0.0, abs=1e-15)


def test_knots_between(pw):
    assert list(pw.knots_between(3.0, 0.5)) == [1.0]
    assert pw.knots_between(1.5, 2.5).size == 0


def test_dict_round_trip(pw):
    back = PiecewisePolynomial.from_dict(pw.to_dict())
    x = np.linspace(0, 3, 31)
    assert np.array_equal(back(x), pw(x))
