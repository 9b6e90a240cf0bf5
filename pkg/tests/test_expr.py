import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffgeo.errors import InputError
from diffgeo.expr import Expr

xs = st.floats(0.1, 2.0)


@given(xs, xs)
def test_evaluation_matches_python(x, y):
    e = Expr.parse("2*x^3 - sin(x*y)/exp(y) + ln(x) + pow(y, 2) - pi", ("x", "y"))
    expected = 2 * x**3 - math.sin(x * y) / math.exp(y) + math.log(x) + y**2 - math.pi
    assert e(x, y) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(xs, xs)
def test_symbolic_derivative_matches_finite_difference(x, y):
    e = Expr.parse("x^y * cos(x) + exp(-x*y)", ("x", "y"))
    h = 1e-6
    for var, num in (("x", (e(x + h, y) - e(x - h, y)) / (2 * h)), ("y", (e(x, y + h) - e(x, y - h)) / (2 * h))):
        assert e.diff(var)(x, y) == pytest.approx(num, rel=1e-6, abs=1e-6)


def test_precedence_and_unary_minus():
    assert Expr.parse("-2^2", ("x",))(0.0) == pytest.approx(-4.0)
    assert Expr.parse("2^3^2", ("x",))(0.0) == pytest.approx(512.0)
    assert Expr.parse("1 - 2 - 3", ("x",))(0.0) == pytest.approx(-4.0)
    assert Expr.parse("x ** 2", ("x",))(3.0) == pytest.approx(9.0)


def test_vectorised_evaluation():
    e = Expr.parse("x*y + 1", ("x", "y"))
    assert np.allclose(e(np.array([1.0, 2.0]), np.array([3.0, 4.0])), [4.0, 9.0])


@pytest.mark.parametrize("text", ["", "x +", "foo(x)", "z", "2 $ 3", "(x", "sin()"])
def test_parse_errors(text):
    with pytest.raises(InputError):
        Expr.parse(text, ("x",))


def test_diff_unknown_variable():
    with pytest.raises(InputError):
        Expr.parse("x", ("x",)).diff("y")


def test_negative_exponent_and_negated_power():
    assert Expr.parse("2^-1", ("x",))(0.0) == pytest.approx(0.5)
    assert Expr.parse("-x^2", ("x",))(3.0) == pytest.approx(-9.0)
