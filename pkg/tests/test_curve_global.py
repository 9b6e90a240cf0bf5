import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffgeo import curve_global as cg
from diffgeo import curves as cv
from diffgeo.errors import CuspError, DegenerateVertex, InputError, NoInteriorPoint, NotClosed, NotPlanar
from diffgeo.suites import random_space_curve, random_star_curve


def test_total_curvature_of_circle_and_helix_turn():
    assert cg.total_curvature(cv.circle(3.0)) == pytest.approx(2 * math.pi, abs=1e-10)
    # helix(a, b) over one turn: kappa * length = a / sqrt(a^2 + b^2) * 2 pi
    assert cg.total_curvature(cv.helix(1.0, 1.0)) == pytest.approx(math.sqrt(2) * math.pi, abs=1e-10)


def test_square_as_piecewise_curve():
    corners = [np.array(p, float) for p in ((0, 0), (1, 0), (1, 1), (0, 1))]
    arcs = [cv.segment(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    pc = cg.PiecewiseCurve(arcs, closed=True)
    assert pc.external_angles == pytest.approx([math.pi / 2] * 4)
    assert cg.total_curvature(pc) == pytest.approx(2 * math.pi)
    assert cg.total_signed_curvature(pc) == pytest.approx(2 * math.pi)
    rev = cg.PiecewiseCurve([cv.segment(corners[(i + 1) % 4], corners[i]) for i in reversed(range(4))], closed=True)
    assert cg.total_signed_curvature(rev) == pytest.approx(-2 * math.pi)


def test_piecewise_errors():
    with pytest.raises(InputError):
        cg.PiecewiseCurve([cv.segment([0, 0], [1, 0]), cv.segment([2, 0], [3, 0])])
    back = cg.PiecewiseCurve([cv.segment([0, 0], [1, 0]), cv.segment([1, 0], [0, 0])])
    with pytest.raises(CuspError):
        cg.total_signed_curvature(back)
    with pytest.raises(NotPlanar):
        cg.total_signed_curvature(cv.helix())


def test_polyline_total_curvature():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert cg.polyline_total_curvature(square, closed=True) == pytest.approx(2 * math.pi)
    assert cg.polyline_total_curvature(square, closed=False) == pytest.approx(math.pi)
    with pytest.raises(DegenerateVertex):
        cg.polyline_total_curvature([(0, 0), (0, 0), (1, 1)])
    with pytest.raises(InputError):
        cg.polyline_total_curvature([(0, 0), (1, 1)])


@given(st.integers(0, 10_000))
def test_inscribed_polylines_never_exceed_smooth_total_curvature(seed):
    c = random_space_curve(np.random.default_rng(seed))
    poly = cg.polyline_total_curvature(cg.inscribed_polyline(c, 64), closed=True)
    assert poly <= cg.total_curvature(c) + 1e-9
    assert poly >= 2 * math.pi - 1e-9


@given(st.integers(0, 10_000), st.booleans())
def test_rotation_index_of_star_curves(seed, cw):
    c = random_star_curve(np.random.default_rng(seed), clockwise=cw)
    assert cg.total_signed_curvature(c) == pytest.approx(-2 * math.pi if cw else 2 * math.pi, abs=1e-8)
    assert cg.total_curvature(c) >= 2 * math.pi - 1e-9


def test_crofton_plane_circle_and_ellipse():
    assert cg.crofton_length_plane(cv.circle(1.0), 256) == pytest.approx(2 * math.pi, rel=1e-4)
    e = cv.ellipse(2.0, 1.0)
    assert cg.crofton_length_plane(e, 1024) == pytest.approx(cv.curve_length(e), rel=5e-3)


@pytest.mark.parametrize("mode", ["line", "plane"])
def test_crofton_space_segment_and_helix(mode):
    seg = cv.segment([0.0, 0.0, 0.0], [1.0, 2.0, -0.5])
    assert cg.crofton_length_space(seg, mode, 4096) == pytest.approx(cv.curve_length(seg), rel=1e-2)
    h = cv.helix(1.0, 1.0)
    assert cg.crofton_length_space(h, mode, 4096) == pytest.approx(cv.curve_length(h), rel=1e-2)


def test_crofton_input_checks():
    with pytest.raises(NotPlanar):
        cg.crofton_length_plane(cv.helix())
    with pytest.raises(InputError):
        cg.crofton_length_space(cv.circle(), "line")
    with pytest.raises(InputError):
        cg.crofton_length_space(cv.helix(), "sphere")


def test_direction_sets_are_unit():
    assert np.allclose(np.linalg.norm(cg.sphere_directions(100), axis=1), 1.0)
    assert np.allclose(np.linalg.norm(cg.plane_directions(100), axis=1), 1.0)


def test_max_inscribed_disc():
    center, r = cg.max_inscribed_disc(cv.circle(2.0, center=(1.0, -1.0)), 101)
    assert r == pytest.approx(2.0, abs=0.05)
    assert np.allclose(center, [1.0, -1.0], atol=0.05)
    _, r = cg.max_inscribed_disc(cv.ellipse(2.0, 1.0), 101)
    assert r == pytest.approx(1.0, abs=0.05)
    with pytest.raises(NotClosed):
        cg.max_inscribed_disc(cv.segment([0, 0], [1, 1]))
    with pytest.raises(NoInteriorPoint):
        cg.max_inscribed_disc(cv.circle(1.0), grid_n=2)


def test_convexity():
    assert cg.is_convex(cv.ellipse(2.0, 1.0))
    assert cg.is_convex(cv.circle(1.0, clockwise=True))
    assert not cg.is_convex(cv.limacon(1.0, 0.8))
