import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffgeo import comparison as cmp
from diffgeo import surfaces as sf
from diffgeo.errors import ConfigurationMismatch, InputError, RayNotMinimizing, TriangleInequalityViolation

SPHERE = sf.sphere()
NORTH = np.array([0.0, 0.0, 1.0])


def test_model_triangle_345():
    m = cmp.model_triangle(3.0, 4.0, 5.0)
    assert m.angles[2] == pytest.approx(math.pi / 2)
    assert m.angles[0] == pytest.approx(math.atan2(3, 4))
    V = m.vertices()
    assert np.linalg.norm(V[1] - V[2]) == pytest.approx(3.0)
    assert np.linalg.norm(V[2] - V[0]) == pytest.approx(4.0)
    assert not m.degenerate


def test_model_triangle_degenerate_and_invalid():
    assert cmp.model_triangle(1.0, 1.0, 2.0).degenerate
    with pytest.raises(TriangleInequalityViolation):
        cmp.model_triangle(1.0, 1.0, 3.0)
    with pytest.raises(InputError):
        cmp.model_triangle(-1.0, 1.0, 1.0)


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.01, 0.99))
def test_model_angles_sum_to_pi(a, b, frac):
    c = abs(a - b) + frac * (a + b - abs(a - b))
    m = cmp.model_triangle(a, b, c)
    assert sum(m.angles) == pytest.approx(math.pi, abs=1e-9)
    assert cmp.model_angle(a, b, c) == pytest.approx(m.angles[2], abs=1e-9)


def test_plane_polar_chart_is_euclidean():
    pc = cmp.polar_chart(sf.plane(), np.zeros(3), 1.0, 50, 16)
    assert np.allclose(pc.b, pc.r[:, None], atol=1e-12)
    assert pc.radial_speed_error() < 1e-12 and pc.gauss_lemma_error() < 1e-12
    assert pc.first_zero() is None


def test_sphere_polar_chart():
    pc = cmp.polar_chart(SPHERE, NORTH, 1.2, 120, 16)
    assert np.max(np.abs(pc.b - np.sin(pc.r)[:, None])) < 1e-10
    assert cmp.jacobi_residual(pc, SPHERE) < 1e-6
    assert cmp.egregium_discrepancy(pc) < 1e-6


def test_first_zero_is_conjugate_radius():
    pc = cmp.polar_chart(SPHERE, NORTH, 3.3, 330, 8)
    assert pc.first_zero() == pytest.approx(math.pi, abs=0.02)


def test_rauch_on_sphere_and_saddle():
    circle = lambda t: (0.8 * math.cos(2 * math.pi * t), 0.8 * math.sin(2 * math.pi * t))
    lt, li = cmp.rauch_compare(SPHERE, NORTH, circle, n=128)
    assert lt == pytest.approx(2 * math.pi * 0.8, rel=1e-6)
    assert li == pytest.approx(2 * math.pi * math.sin(0.8), rel=1e-6)
    lt, li = cmp.rauch_compare(sf.saddle(), np.zeros(3), circle, n=128)
    assert li > lt


def test_octant_hinges():
    X, Y, Z = np.eye(3)
    pairs = cmp.hinge_compare(SPHERE, X, Y, Z, 2.0)
    for meas, model in pairs:
        assert meas == pytest.approx(math.pi / 2, abs=1e-7)
        assert model == pytest.approx(math.pi / 3, abs=1e-9)
    rec = cmp.comparison_record(SPHERE, X, Y, Z, 2.0)
    assert set(rec) == {"triangle", "measured_angles", "model_angles", "verdict_margin"}
    assert rec["verdict_margin"] == pytest.approx(math.pi / 6, abs=1e-7)


def test_saddle_triangle_is_thin():
    ch = sf.saddle().global_chart
    x, y, z = ch.point(0.0, 0.0), ch.point(0.5, 0.1), ch.point(0.1, 0.45)
    saddle = sf.saddle()
    for meas, model in cmp.hinge_compare(saddle, x, y, z, 1.0):
        assert meas <= model + 1e-9
    lo, hi = cmp.triangle_fatness(saddle, x, y, z, n_pairs=4, r_max=1.0, mesh_n=96)
    assert hi <= 2e-3


def test_sphere_triangle_is_fat():
    ch = SPHERE.global_chart
    x, y, z = ch.point(0.0, 0.3), ch.point(2.0, 0.35), ch.point(4.0, 0.3)
    lo, hi = cmp.triangle_fatness(SPHERE, x, y, z, n_pairs=4, r_max=1.2, mesh_n=96)
    assert lo >= -2e-3


def _alexandrov_config(beta, p2=(0.7, 1.2)):
    """Plane quadrilaterals with |x'y'| = |y'z'| = 1 along a line and the
    first one bent by beta at y."""
    x2, y2, z2 = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([2.0, 0.0])
    p2 = np.array(p2)
    a, b = np.linalg.norm(p2 - x2), np.linalg.norm(p2 - z2)
    x, y = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    z = y + np.array([math.cos(beta), math.sin(beta)])
    d = np.linalg.norm(z - x)
    ex = (z - x) / d
    along = (a * a - b * b + d * d) / (2 * d)
    p = x + along * ex + math.sqrt(a * a - along * along) * np.array([-ex[1], ex[0]])
    return p, x, y, z, p2, x2, y2, z2


@given(st.floats(-0.8, 0.8).filter(lambda b: abs(b) > 1e-3))
def test_alexandrov_signs_agree(beta):
    signs = cmp.alexandrov_signs(*_alexandrov_config(beta))
    assert len(set(signs)) == 1
    assert signs[0] == (1 if beta > 0 else -1)


def test_alexandrov_flat_and_mismatch():
    assert cmp.alexandrov_signs(*_alexandrov_config(0.0)) == (0, 0, 0)
    p, x, y, z, p2, x2, y2, z2 = _alexandrov_config(0.3)
    with pytest.raises(ConfigurationMismatch):
        cmp.alexandrov_signs(p + 0.1, x, y, z, p2, x2, y2, z2)
    with pytest.raises(ConfigurationMismatch):
        cmp.alexandrov_signs(p, x, y, z, p2, x2, y2 + np.array([0.0, 0.1]), z2)


def test_busemann_in_the_plane():
    ray = lambda t: np.array([t, 0.0, 0.0])
    d = lambda a, b: float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    assert cmp.busemann(ray, [0.0, 1.0, 0.0], 100.0, d).value == pytest.approx(0.0, abs=1e-4)
    bv = cmp.busemann(ray, [-1.0, 0.0, 0.0], 100.0, d)
    assert bv.value == pytest.approx(1.0, abs=1e-12)
    assert bv.monotone and not bv.slow
    slow = cmp.busemann(ray, [0.0, 3.0, 0.0], 10.0, d)
    assert slow.slow


def test_busemann_along_surface_ray():
    sd = sf.saddle()
    ray = cmp.surface_ray(sd, np.zeros(3), [1.0, 0.0, 0.0], 4.0)
    dist = cmp.log_distance(sd, 12.0)
    assert cmp.busemann(ray, ray(1.0), 4.0, dist).value == pytest.approx(-1.0, abs=1e-4)


def test_ray_on_sphere_is_not_minimizing():
    ray = cmp.surface_ray(SPHERE, NORTH, [1.0, 0.0, 0.0], 4.0)
    with pytest.raises(RayNotMinimizing):
        cmp.check_ray_minimizing(SPHERE, ray, 4.0, n=64)
