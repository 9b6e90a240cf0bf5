import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ellipe
from scipy.spatial.transform import Rotation

from diffgeo import curves as cv
from diffgeo.errors import DomainViolation, InputError, NotClosed, NotPlanar, NotRegular, VanishingCurvature
from diffgeo.suites import random_star_curve


@pytest.mark.parametrize("a,b", [(1, 1), (3, 4), (0.5, 2)])
def test_helix_frenet_values(a, b):
    fr = cv.frenet(cv.helix(a, b), 0.7)
    assert fr.kappa == pytest.approx(a / (a * a + b * b), abs=1e-12)
    assert fr.tau == pytest.approx(b / (a * a + b * b), abs=1e-12)
    M = np.array([fr.T, fr.N, fr.B])
    assert np.allclose(M @ M.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0)


def test_frenet_by_finite_differences():
    """Same helix without analytic derivatives: fourth-order stencils."""
    c = cv.from_callable(lambda t: np.array([math.cos(t), math.sin(t), t]), (0.0, 6.0))
    fr = cv.frenet(c, 1.3)
    assert fr.kappa == pytest.approx(0.5, abs=1e-6)
    assert fr.tau == pytest.approx(0.5, abs=1e-4)


def test_straight_space_curve_has_no_frenet_frame():
    with pytest.raises(VanishingCurvature) as info:
        cv.frenet(cv.segment([0, 0, 0], [1, 2, 3]), 0.5)
    assert info.value.kappa == pytest.approx(0.0, abs=1e-12)


def test_circle_length_and_signed_curvature():
    c = cv.circle(2.0)
    assert cv.curve_length(c) == pytest.approx(4 * math.pi, rel=1e-12)
    assert cv.signed_curvature(c, 1.0) == pytest.approx(0.5)
    assert cv.signed_curvature(cv.circle(2.0, clockwise=True), 1.0) == pytest.approx(-0.5)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (3.0, 0.5)])
def test_ellipse_length_against_complete_elliptic_integral(a, b):
    assert cv.curve_length(cv.ellipse(a, b)) == pytest.approx(4 * a * ellipe(1 - (b / a) ** 2), rel=1e-11)


def test_partial_length_and_domain_checks():
    c = cv.helix(1.0, 1.0)
    assert cv.curve_length(c, 0.0, 1.0) == pytest.approx(math.sqrt(2), rel=1e-12)
    with pytest.raises(DomainViolation):
        cv.curve_length(c, 1.0, 0.5)


def test_to_arclength_is_unit_speed():
    c = cv.ellipse(2.0, 1.0)
    a = cv.to_arclength(c)
    assert a.domain[1] == pytest.approx(cv.curve_length(c), rel=1e-10)
    for s in np.linspace(0.1, a.domain[1] - 0.1, 7):
        assert a.speed(s) == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(a.point(0.0), c.point(0.0))


def test_osculating_circle_of_ellipse_and_flat_point():
    a, b = 2.0, 1.0
    circ = cv.osculating_circle(cv.ellipse(a, b), 0.0)
    assert circ.radius == pytest.approx(b * b / a)
    assert np.allclose(circ.center, [a - b * b / a, 0.0])
    cubic = cv.graph2d(lambda x: x**3, (-1.0, 1.0), lambda x: 3 * x**2, lambda x: 6 * x, lambda x: 6.0)
    line = cv.osculating_circle(cubic, 0.0)
    assert isinstance(line, cv.Line2D)
    assert np.allclose(line.direction, [1.0, 0.0])


def test_evolute_of_ellipse_is_an_astroid():
    a, b = 2.0, 1.0
    e = cv.evolute(cv.ellipse(a, b))
    for t in (0.3, 1.1, 2.5):
        expected = [(a * a - b * b) / a * math.cos(t) ** 3, (b * b - a * a) / b * math.sin(t) ** 3]
        assert np.allclose(e.point(t), expected, atol=1e-9)


def test_evolute_needs_nonzero_curvature():
    with pytest.raises(VanishingCurvature):
        cv.evolute(cv.from_callable(lambda t: np.array([t, t**3]), (-1, 1)))


def test_ellipse_vertices():
    rep = cv.vertices(cv.ellipse(2.0, 1.0))
    assert rep.count == 4
    assert np.allclose(sorted(rep.params), [0.0, math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-6)
    assert cv.vertices(cv.circle(1.0)).degenerate


@given(st.integers(0, 10_000))
def test_four_vertex_property(seed):
    c = random_star_curve(np.random.default_rng(seed))
    assert cv.vertices(c).count >= 4


def test_plane_only_operations_reject_space_curves():
    h = cv.helix()
    for op in (lambda: cv.signed_curvature(h, 0.1), lambda: cv.evolute(h), lambda: cv.vertices(h)):
        with pytest.raises(NotPlanar):
            op()
    with pytest.raises(NotClosed):
        cv.vertices(cv.graph2d(lambda x: x * x, (-1, 1)))


def test_constructor_errors():
    with pytest.raises(InputError):
        cv.ParamCurve(lambda t: np.array([t, t]), (1.0, 0.0))
    with pytest.raises(NotRegular):
        cv.from_callable(lambda t: np.array([0.0, 0.0, 0.0]), (0.0, 1.0))
    with pytest.raises(InputError):
        cv.trig_poly([[1.0]], [[0.0]])
    with pytest.raises(InputError):
        cv.from_samples([[0, 0, 0], [1, 1, 1]])


def test_spline_samples_of_a_circle():
    t = np.linspace(0, 2 * math.pi, 200, endpoint=False)
    rows = np.column_stack([t, 3 * np.cos(t), 3 * np.sin(t)])
    c = cv.from_samples(rows, closed=True)
    assert cv.signed_curvature(c, 1.0) == pytest.approx(1 / 3, rel=1e-4)
    assert cv.curve_length(c) == pytest.approx(6 * math.pi, rel=1e-7)


coeff = st.floats(-1, 1, allow_nan=False)


@given(st.lists(coeff, min_size=9, max_size=9), st.floats(0.1, 0.9), st.floats(0.1, 5.0))
def test_curvature_invariant_under_rigid_motion_and_scaling(rot, t, lam):
    c = cv.helix(1.0, 0.7)
    R = Rotation.from_rotvec(np.array(rot[:3])).as_matrix()
    shift = np.array(rot[3:6])
    moved = cv.from_callable(lambda s: lam * (R @ c.point(s)) + shift, c.domain)
    f0, f1 = cv.frenet(c, 2 * math.pi * t), cv.frenet(moved, 2 * math.pi * t)
    assert f1.kappa == pytest.approx(f0.kappa / lam, rel=1e-4)
    assert f1.tau == pytest.approx(f0.tau / lam, rel=1e-3, abs=1e-4)


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.0, 6.2))
def test_helix_curvature_closed_form(a, b, t):
    fr = cv.frenet(cv.helix(a, b), t)
    assert fr.kappa == pytest.approx(a / (a * a + b * b), rel=1e-10)


def test_smoothing_tames_noisy_samples():
    rng = np.random.default_rng(0)
    t = np.linspace(0, np.pi, 200)
    rows = np.column_stack([t, np.cos(t), np.sin(t)])
    rows[:, 1:] += 1e-3 * rng.standard_normal((200, 2))
    ts = np.linspace(0.5, 2.6, 30)
    raw = cv.from_samples(rows)
    smooth = cv.from_samples(rows, smoothing=1e-3)
    err = lambda c: max(abs(cv.signed_curvature(c, s) - 1.0) for s in ts)
    assert err(smooth) < 0.2 < err(raw)
    with pytest.raises(InputError):
        cv.from_samples(rows, closed=True, smoothing=1e-3)
