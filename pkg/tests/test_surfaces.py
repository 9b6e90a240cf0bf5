import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffgeo import curves as cv
from diffgeo import surfaces as sf
from diffgeo.errors import AxisContact, InputError, IrregularPoint, NotTangent
from diffgeo.expr import Expr

angle = st.floats(0.0, 2 * math.pi)


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_is_umbilic_in_every_chart(R):
    s = sf.sphere(R)
    for ch in s.charts:
        cd = sf.curvatures(ch, 0.3, -0.4)
        assert (cd.k1, cd.k2) == pytest.approx((1 / R, 1 / R), abs=1e-9)
        assert cd.umbilic
    assert sf.gauss_curvature(s.global_chart, 1.0, 1.0) == pytest.approx(1 / R**2)


def test_cylinder_principal_curvatures():
    cd = sf.curvatures(sf.cylinder(0.5).global_chart, 0.4, 1.0)
    assert sorted([cd.k1, cd.k2]) == pytest.approx([0.0, 2.0], abs=1e-12)


@given(angle, angle)
def test_torus_gauss_curvature_closed_form(u, v):
    R, r = 2.0, 1.0
    K = sf.gauss_curvature(sf.torus(R, r).global_chart, u, v)
    assert K == pytest.approx(math.cos(u) / (r * (R + r * math.cos(u))), abs=1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_graph_curvature_against_monge_formula(x, y):
    # z = x^2 - y^2: K = (fxx fyy - fxy^2) / (1 + fx^2 + fy^2)^2
    K = sf.gauss_curvature(sf.saddle().global_chart, x, y)
    assert K == pytest.approx(-4.0 / (1 + 4 * x * x + 4 * y * y) ** 2, rel=1e-12)


@given(st.floats(-1.4, 1.4), angle)
def test_catenoid_minimal_and_pseudosphere_constant(s, v):
    assert abs(sf.mean_curvature(sf.catenoid().global_chart, s, v)) < 1e-9
    assert sf.gauss_curvature(sf.pseudosphere().global_chart, 0.6 + abs(s), v) == pytest.approx(-1.0, abs=1e-9)


@given(st.floats(-2, 2), st.floats(-2, 2), angle)
def test_shape_operator_symmetric_and_euler(x, y, phi):
    ch = sf.paraboloid().global_chart
    so = sf.shape_operator(ch, x, y)
    assert so.matrix[0, 1] == pytest.approx(so.matrix[1, 0], abs=1e-12)
    cd = sf.curvatures(ch, x, y)
    w = math.cos(phi) * cd.e1 + math.sin(phi) * cd.e2
    kn = sf.normal_curvature(ch, x, y, w)
    assert kn == pytest.approx(cd.k1 * math.cos(phi) ** 2 + cd.k2 * math.sin(phi) ** 2, abs=1e-12)


def test_normal_curvature_rejects_non_tangent():
    ch = sf.sphere().global_chart
    with pytest.raises(NotTangent):
        sf.normal_curvature(ch, 1.0, 1.0, ch.normal(1.0, 1.0))


def test_frame_and_irregular_pole():
    ch = sf.sphere().global_chart
    su, sv, n = sf.frame(ch, 0.5, 1.0)
    assert abs(n @ su) < 1e-14 and abs(n @ sv) < 1e-14
    assert np.dot(n, ch.point(0.5, 1.0)) < 0  # inward
    with pytest.raises(IrregularPoint):
        sf.frame(ch, 0.5, 0.0)


def test_areas_and_total_curvature():
    assert sf.area(sf.sphere(2.0)) == pytest.approx(16 * math.pi, rel=1e-10)
    assert sf.area(sf.torus(2.0, 1.0)) == pytest.approx(8 * math.pi**2, rel=1e-10)
    assert sf.integral_gauss(sf.sphere(2.0)) == pytest.approx(4 * math.pi, abs=1e-9)
    assert sf.integral_gauss(sf.torus(3.0, 1.0)) == pytest.approx(0.0, abs=1e-9)


def test_surface_integral_of_height_squared():
    s = sf.sphere()
    ch = s.global_chart
    val = sf.surface_integral(ch, sf.full_region(ch), lambda p: p[..., 2] ** 2)
    assert val == pytest.approx(4 * math.pi / 3, rel=1e-10)
    with pytest.raises(InputError):
        sf.chart_integral(ch, (1.0, 0.0, 0.0, 1.0), lambda U, V: U)


def test_revolution_curvatures_for_unit_sphere_generatrix():
    gen = cv.ParamCurve(
        lambda s: sf._stack(-np.cos(s), np.sin(s)), (0.2, 2.9),
        d1=lambda s: np.array([math.sin(s), math.cos(s)]),
        d2=lambda s: np.array([math.cos(s), -math.sin(s)]),
    )
    kp, km = sf.revolution_curvatures(gen, 1.0)
    assert (kp, km) == pytest.approx((1.0, 1.0))
    surf = sf.revolution(gen)
    cd = sf.curvatures(surf.global_chart, 1.0, 0.3)
    assert sorted(map(abs, (cd.k1, cd.k2))) == pytest.approx([1.0, 1.0], abs=1e-9)


def test_revolution_and_torus_input_checks():
    with pytest.raises(InputError):
        sf.torus(1.0, 2.0)
    touching = cv.ParamCurve(lambda s: sf._stack(s, s), (-1.0, 1.0))
    with pytest.raises(AxisContact):
        sf.revolution(touching)


def test_chart_surface_from_expressions():
    s = sf.chart_surface(["sin(v)*cos(u)", "sin(v)*sin(u)", "cos(v)"], (0.0, 2 * math.pi), (0.3, 2.8), uperiod=2 * math.pi)
    ch = s.global_chart
    assert sf.gauss_curvature(ch, 1.0, 1.2) == pytest.approx(1.0, abs=1e-12)
    u, v = ch.inverse(ch.point(1.0, 1.2))
    assert (u, v) == pytest.approx((1.0, 1.2), abs=1e-9)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_sphere_locate_round_trip(x, y, z):
    p = np.array([x, y, z])
    if np.linalg.norm(p) < 1e-3:
        return
    p /= np.linalg.norm(p)
    s = sf.sphere()
    i, (u, v) = s.locate(p)
    assert s.charts[i].safe(u, v)
    assert np.allclose(s.charts[i].point(u, v), p, atol=1e-12)


def test_graph_from_expression_matches_builtin():
    g = sf.graph(Expr.parse("x^2 - y^2", ("x", "y")))
    assert sf.gauss_curvature(g.global_chart, 0.3, 0.2) == pytest.approx(sf.gauss_curvature(sf.saddle().global_chart, 0.3, 0.2))
