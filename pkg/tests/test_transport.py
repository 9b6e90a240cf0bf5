import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffgeo import geodesics as geo
from diffgeo import surfaces as sf
from diffgeo import transport as tr
from diffgeo.errors import CuspError, InputError, NotTangent
from diffgeo.suites import chart_disc, octant_loop

SPHERE = sf.sphere()


def _latlong_loop(phi0, s):
    """Parallel at colatitude phi0, traversed with longitude speed s."""
    surf = sf.Surface("sphere", [SPHERE.global_chart], SPHERE.global_chart, axis=SPHERE.axis, sign_K=1)
    return tr.OnSurfaceCurve.from_uv(
        surf, 0, lambda t: np.array([s * t, phi0]), (0.0, 2 * math.pi),
        lambda t: np.array([s, 0.0]), lambda t: np.zeros(2), closed=True,
    )


def test_octant_loop():
    loop = octant_loop()
    assert loop.external_angles == pytest.approx([math.pi / 2] * 3)
    assert tr.total_geodesic_curvature(loop) == pytest.approx(1.5 * math.pi, abs=1e-10)
    assert tr.holonomy(loop) == pytest.approx(math.pi / 2, abs=1e-9)
    rep = tr.gb_residual(tr.DiscRegion(loop))
    assert rep.intK == pytest.approx(math.pi / 2, abs=1e-10)
    assert abs(rep.residual) < 1e-10
    assert set(rep.as_dict()) == {"tgc", "intK", "residual"}


def test_reversed_octant():
    rev = octant_loop().reversed()
    assert tr.total_geodesic_curvature(rev) == pytest.approx(-1.5 * math.pi, abs=1e-10)
    assert tr.holonomy(rev) == pytest.approx(-math.pi / 2, abs=1e-9)
    with pytest.raises(InputError):
        tr.DiscRegion(rev)


@pytest.mark.parametrize("phi0", [0.4, 1.0, 2.0])
def test_latitude_circle(phi0):
    loop = _latlong_loop(phi0, 1.0)
    kg = tr.geodesic_curvature(loop, 0.3)
    assert abs(kg) == pytest.approx(abs(1 / math.tan(phi0)), abs=1e-9)
    cap = 2 * math.pi * (1 - math.cos(phi0))
    hol = tr.holonomy(loop)
    assert tr.wrap_angle(hol + cap) == pytest.approx(0.0, abs=1e-8) or tr.wrap_angle(hol - cap) == pytest.approx(0.0, abs=1e-8)
    # transport is a clockwise rotation by the total geodesic curvature
    assert tr.wrap_angle(hol + tr.total_geodesic_curvature(loop)) == pytest.approx(0.0, abs=1e-8)
    assert tr.wrap_angle(hol + tr.rotation_of_field(loop)) == pytest.approx(0.0, abs=1e-7)


def test_plane_circle():
    pl = sf.plane()
    loop = tr.OnSurfaceCurve.from_uv(
        pl, 0, lambda t: 2 * np.array([math.cos(t), math.sin(t)]), (0.0, 2 * math.pi),
        lambda t: 2 * np.array([-math.sin(t), math.cos(t)]), lambda t: -2 * np.array([math.cos(t), math.sin(t)]), closed=True,
    )
    assert abs(tr.geodesic_curvature(loop, 1.0)) == pytest.approx(0.5)
    assert abs(tr.total_geodesic_curvature(loop)) == pytest.approx(2 * math.pi, abs=1e-10)
    assert tr.holonomy(loop) == pytest.approx(0.0, abs=1e-9)


def test_transport_preserves_length_and_tangency():
    loop = octant_loop()
    v0 = np.array([0.0, 0.6, 0.8])
    res = tr.parallel_transport(loop, v0)
    vecs = res.all_vectors()
    assert np.allclose(np.linalg.norm(vecs, axis=1), 1.0, atol=1e-10)
    assert abs(res.v_end @ loop.end) < 1e-10
    with pytest.raises(NotTangent):
        tr.parallel_transport(loop, np.array([1.0, 0.0, 0.0]))


def test_geodesic_velocity_is_parallel():
    to = sf.torus()
    ch = to.global_chart
    p = ch.point(0.4, 0.2)
    su, sv = ch.partials(0.4, 0.2)
    w = (su / np.linalg.norm(su) + sv / np.linalg.norm(sv)) / math.sqrt(2)
    path = geo.geodesic_shoot(to, p, w, 2.0, max_step=0.02)
    c = tr.OnSurfaceCurve(to, tr.OnSurfaceCurve.from_geodesic_piece(path, 2.0), False)
    assert np.allclose(tr.parallel_transport(c, w).v_end, path.final_velocity, atol=1e-7)
    assert abs(tr.total_geodesic_curvature(c)) < 1e-7


def test_geodesic_triangle_gauss_bonnet():
    """Geodesic triangle on the sphere: sum of interior angles - pi = area."""
    verts = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), np.array([0.6, 0.8, 0.0])]
    loop = tr.broken_geodesic(SPHERE, verts, 2.0)
    interior = sum(math.pi - a for a in loop.external_angles)
    area = interior - math.pi
    assert tr.total_geodesic_curvature(loop) == pytest.approx(2 * math.pi - area, abs=1e-6)


def test_cusp_rejected():
    a, b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])
    there_and_back = tr.broken_geodesic(SPHERE, [a, b], 2.0, closed=True)
    with pytest.raises(CuspError):
        tr.total_geodesic_curvature(there_and_back)


def test_euler_characteristics():
    assert tr.gb_general(sf.sphere()).chi_estimate == pytest.approx(2.0, abs=1e-9)
    assert tr.gb_general(sf.torus()).chi_estimate == pytest.approx(0.0, abs=1e-9)
    cyl = sf.cylinder(1.0)
    ch = cyl.global_chart
    lo = tr.OnSurfaceCurve.from_uv(cyl, 0, lambda t: np.array([-1.0, t]), (0.0, 2 * math.pi), lambda t: np.array([0.0, 1.0]), lambda t: np.zeros(2), closed=True)
    hi = tr.OnSurfaceCurve.from_uv(cyl, 0, lambda t: np.array([1.0, -t]), (0.0, 2 * math.pi), lambda t: np.array([0.0, -1.0]), lambda t: np.zeros(2), closed=True)
    rep = tr.gb_general(cyl, (-1.0, 1.0, 0.0, 2 * math.pi), [lo, hi])
    assert rep.chi_estimate == pytest.approx(0.0, abs=1e-9)


def test_periodic_sample_curve_matches_analytic():
    to = sf.torus()
    t = 2 * math.pi * np.arange(64) / 64
    uv = np.column_stack([0.3 + 0.2 * np.cos(t), 1.0 + 0.2 * np.sin(t)])
    sampled = tr.OnSurfaceCurve.from_periodic_samples(to, 0, uv)
    analytic = chart_disc(to, 0, (0.3, 1.0), 0.2)
    assert tr.total_geodesic_curvature(sampled) == pytest.approx(tr.total_geodesic_curvature(analytic), abs=1e-9)


@settings(max_examples=8)
@given(st.floats(0.5, 5.5), st.floats(0.5, 5.5), st.floats(0.05, 0.4), st.floats(-0.15, 0.15), st.floats(-0.15, 0.15))
def test_gauss_bonnet_on_torus_discs(u, v, r, a, b):
    to = sf.torus()
    disc = tr.DiscRegion(chart_disc(to, 0, (u, v), r, (a, b)), center=(u, v))
    assert abs(tr.gb_residual(disc).residual) < 1e-8


def test_disc_needs_closed_single_chart_boundary():
    open_curve = tr.OnSurfaceCurve.from_uv(sf.plane(), 0, lambda t: np.array([t, 0.0]), (0.0, 1.0))
    with pytest.raises(InputError):
        tr.DiscRegion(open_curve)
