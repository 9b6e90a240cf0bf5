"""Rebuilding curves from their curvature functions, and congruence tests."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import numeric
from .curves import ParamCurve, _ArcLengthMap, curvature, frenet, signed_curvature
from .errors import DegenerateConfiguration, InputError, NonpositiveCurvature
from .numeric import DEFAULT_TOL, Tolerances

CONGRUENCE_FACTOR = 1e-4


@dataclass(frozen=True)
class InitialPose2D:
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise InputError("initial direction must be a unit vector")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class InitialFrame3D:
    point: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        M = np.array([self.T, self.N, self.B], dtype=float)
        if np.max(np.abs(M @ M.T - np.eye(3))) > 1e-10 or abs(np.linalg.det(M) - 1.0) > 1e-10:
            raise InputError("initial frame must be orthonormal and right-handed")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        for k, v in zip("TNB", M):
            object.__setattr__(self, k, v)

    @classmethod
    def standard(cls, point=(0.0, 0.0, 0.0)) -> "InitialFrame3D":
        return cls(np.asarray(point, dtype=float), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))


def reconstruct_plane(skappa: Callable, L: float, pose: InitialPose2D | None = None, tol: Tolerances = DEFAULT_TOL) -> ParamCurve:
    """Unit-speed plane curve with the given signed curvature on ``[0, L]``."""
    pose = pose or InitialPose2D(np.zeros(2), np.array([1.0, 0.0]))
    theta0 = math.atan2(pose.direction[1], pose.direction[0])

    def rhs(s, y):
        return np.array([skappa(s), math.cos(y[0]), math.sin(y[0])])

    path = numeric.ode_solve(rhs, 0.0, [theta0, *pose.point], L, tol, max_step=L / 200)

    def f(s):
        if np.ndim(s):
            return np.array([path(x)[1:] for x in np.ravel(s)]).reshape(np.shape(s) + (2,))
        return path(s)[1:]

    def f1(s):
        th = path(s)[0]
        return np.array([math.cos(th), math.sin(th)])

    def f2(s):
        th = path(s)[0]
        return skappa(s) * np.array([-math.sin(th), math.cos(th)])

    return ParamCurve(f, (0.0, L), d1=f1, d2=f2, name="reconstructed_plane", validate=False)


def _gram_schmidt(frame: np.ndarray) -> np.ndarray:
    T = frame[0] / np.linalg.norm(frame[0])
    N = frame[1] - (frame[1] @ T) * T
    N /= np.linalg.norm(N)
    return np.array([T, N, np.cross(T, N)])


def reconstruct_space(
    kappa: Callable,
    tau: Callable,
    L: float,
    frame: InitialFrame3D | None = None,
    tol: Tolerances = DEFAULT_TOL,
    return_path: bool = False,
):
    """Unit-speed space curve with curvature ``kappa`` and torsion ``tau``.

    The frame is re-orthonormalized after every accepted step. With
    ``return_path`` the raw solution (rows: point, T, N, B) is returned too.
    """
    frame = frame or InitialFrame3D.standard()
    probe = np.linspace(0.0, L, 513)
    if min(kappa(s) for s in probe) <= 0:
        raise NonpositiveCurvature("curvature must stay positive for the Frenet system")

    def rhs(s, y):
        T, N, B = y[1], y[2], y[3]
        k, t = kappa(s), tau(s)
        return np.array([T, k * N, -k * T + t * B, -t * N])

    def project(s, y):
        out = y.copy()
        out[1:] = _gram_schmidt(y[1:])
        return out

    y0 = np.array([frame.point, frame.T, frame.N, frame.B])
    path = numeric.ode_solve(rhs, 0.0, y0, L, tol, project=project, max_step=L / 200)

    def f(s):
        if np.ndim(s):
            return np.array([path(x)[0] for x in np.ravel(s)]).reshape(np.shape(s) + (3,))
        return path(s)[0]

    def f1(s):
        T = path(s)[1]
        return T / np.linalg.norm(T)

    def f2(s):
        fr = _gram_schmidt(path(s)[1:])
        return kappa(s) * fr[1]

    def f3(s):
        T, N, B = _gram_schmidt(path(s)[1:])
        k = kappa(s)
        dk = numeric.derivative(kappa, s, 1, tol)
        return dk * N + k * (-k * T + tau(s) * B)

    curve = ParamCurve(f, (0.0, L), d1=f1, d2=f2, d3=f3, name="reconstructed_space", validate=False)
    return (curve, path) if return_path else curve


@dataclass(frozen=True)
class Alignment:
    rotation: np.ndarray
    translation: np.ndarray
    rms_residual: float
    degenerate: bool = False

    def apply(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.rotation.T + self.translation


def rigid_align(a, b) -> Alignment:
    """Proper rigid motion ``x -> R x + t`` taking ``a`` closest to ``b`` in RMS."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or len(a) < 3:
        raise InputError("rigid_align needs two matched point arrays of length >= 3")
    dim = a.shape[1]
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    A, B = a - ca, b - cb
    sv_a = np.linalg.svd(A, compute_uv=False)
    degenerate = bool(sv_a[1] <= 1e-10 * max(sv_a[0], 1e-300)) if dim >= 2 else False
    U, _, Vt = np.linalg.svd(A.T @ B)
    d = np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0
    D = np.eye(dim)
    D[-1, -1] = d
    R = Vt.T @ D @ U.T
    t = cb - R @ ca
    rms = float(np.sqrt(np.mean(np.sum((a @ R.T + t - b) ** 2, axis=1))))
    if degenerate:
        warnings.warn("collinear points: rotation about the line is arbitrary", stacklevel=2)
    return Alignment(R, t, rms, degenerate)


def congruent(a, b, length: float) -> bool:
    return rigid_align(a, b).rms_residual < CONGRUENCE_FACTOR * length


# ---------------------------------------------------------------------------
# extraction for round trips


@dataclass
class CurvatureProfile:
    """Curvature (and torsion) as cubic splines in arc length."""

    length: float
    kappa: Callable
    tau: Callable | None
    start: np.ndarray
    frame: np.ndarray
    arclength_params: np.ndarray
    samples: np.ndarray


def extract_profile(c: ParamCurve, n: int = 1025) -> CurvatureProfile:
    """Tabulate curvature/torsion of ``c`` against arc length.

    For plane curves ``kappa`` is the signed curvature and ``frame`` holds the
    initial unit tangent.
    """
    table = _ArcLengthMap(c)
    s = np.linspace(0.0, table.length, n)
    t = np.array([table.t_of_s(x) for x in s])
    pts = c.points(t)
    if c.dim == 2:
        k = np.array([signed_curvature(c, x) for x in t])
        d = c.deriv(t[0], 1)
        return CurvatureProfile(table.length, CubicSpline(s, k), None, pts[0], d / np.linalg.norm(d), t, pts)
    fr = [frenet(c, x) for x in t]
    k = CubicSpline(s, [f.kappa for f in fr])
    tau = CubicSpline(s, [f.tau for f in fr])
    f0 = fr[0]
    return CurvatureProfile(table.length, k, tau, pts[0], np.array([f0.T, f0.N, f0.B]), t, pts)


def round_trip(c: ParamCurve, n: int = 1025) -> tuple[float, float]:
    """Extract curvature data from ``c``, rebuild, align; returns (rms, length)."""
    prof = extract_profile(c, n)
    s = np.linspace(0.0, prof.length, n)
    if c.dim == 2:
        rebuilt = reconstruct_plane(lambda x: float(prof.kappa(x)), prof.length)
    else:
        rebuilt = reconstruct_space(lambda x: float(prof.kappa(x)), lambda x: float(prof.tau(x)), prof.length)
    al = rigid_align(rebuilt.points(s), prof.samples)
    return al.rms_residual, prof.length
