import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from diffgeo import curves as cv
from diffgeo import reconstruction as rec
from diffgeo.errors import InputError, NonpositiveCurvature


def test_constant_curvature_plane_is_circle():
    c = rec.reconstruct_plane(lambda s: 0.5, 4 * math.pi)
    assert np.allclose(c.point(4 * math.pi), [0.0, 0.0], atol=1e-9)
    # centre of the circle of radius 2 sits to the left of the start
    assert np.allclose(c.point(2 * math.pi), [0.0, 4.0], atol=1e-9)


def test_pose_is_respected():
    pose = rec.InitialPose2D([1.0, 2.0], [0.0, 1.0])
    c = rec.reconstruct_plane(lambda s: 0.0, 3.0, pose)
    assert np.allclose(c.point(3.0), [1.0, 5.0], atol=1e-12)
    with pytest.raises(InputError):
        rec.InitialPose2D([0, 0], [1.0, 1.0])


def test_constant_curvature_and_torsion_is_helix():
    a, b = 1.0, 1.0
    k, t = a / (a * a + b * b), b / (a * a + b * b)
    L = 2 * math.pi * math.sqrt(a * a + b * b)
    c = rec.reconstruct_space(lambda s: k, lambda s: t, L)
    # the axis is along the Darboux vector tau T + kappa B; one turn advances 2 pi b
    axis = np.array([t, 0.0, k]) / math.hypot(k, t)
    assert float(c.point(L) @ axis) == pytest.approx(2 * math.pi * b, abs=1e-8)
    fr = cv.frenet(c, 1.0)
    assert fr.kappa == pytest.approx(k, abs=1e-8)
    assert fr.tau == pytest.approx(t, abs=1e-6)


def test_space_requires_positive_curvature():
    with pytest.raises(NonpositiveCurvature):
        rec.reconstruct_space(lambda s: s - 1.0, lambda s: 0.0, 2.0)
    with pytest.raises(InputError):
        rec.InitialFrame3D([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, -1])


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_rigid_align_recovers_motion(params):
    rng = np.random.default_rng(1)
    a = rng.normal(size=(20, 3))
    R = Rotation.from_rotvec(params[:3]).as_matrix()
    b = a @ R.T + np.array(params[3:])
    al = rec.rigid_align(a, b)
    assert al.rms_residual < 1e-10
    assert np.allclose(al.rotation, R, atol=1e-9)
    assert np.linalg.det(al.rotation) == pytest.approx(1.0)


def test_rigid_align_never_reflects():
    a = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1.0]])
    b = a * np.array([1, 1, -1.0])
    al = rec.rigid_align(a, b)
    assert np.linalg.det(al.rotation) == pytest.approx(1.0)
    assert al.rms_residual > 0.1


def test_rigid_align_collinear_warns():
    a = np.column_stack([np.arange(5.0), np.zeros(5), np.zeros(5)])
    with pytest.warns(UserWarning):
        assert rec.rigid_align(a, a + 1.0).degenerate
    with pytest.raises(InputError):
        rec.rigid_align(a[:2], a[:2])


@pytest.mark.parametrize("curve", [cv.ellipse(2.0, 1.0), cv.limacon(1.0, 0.5), cv.trefoil(), cv.helix(1.0, 0.5)])
def test_round_trips(curve):
    rms, L = rec.round_trip(curve)
    assert rms < 1e-4 * L
    assert rec.congruent(*[rec.extract_profile(curve).samples] * 2, L)
