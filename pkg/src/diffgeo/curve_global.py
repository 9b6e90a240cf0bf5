"""Global invariants of curves: total (signed) curvature, Crofton length
estimators, inscribed discs and convexity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import numeric
from .curves import REGULARITY_FLOOR, ParamCurve, signed_curvature
from .errors import CuspError, DegenerateVertex, InputError, NoInteriorPoint, NotClosed, NotPlanar
from .numeric import DEFAULT_TOL, Tolerances

PROJECTION_SAMPLES = 8192
CUSP_TOL = 1e-9
JOINT_TOL = 1e-7


def _angle(a, b) -> float:
    """Unsigned angle between two vectors in [0, pi]."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    cross = np.linalg.norm(np.cross(a, b)) if len(a) == 3 else abs(a[0] * b[1] - a[1] * b[0])
    return math.atan2(float(cross), float(a @ b)) if na and nb else 0.0


def _signed_angle(a, b) -> float:
    return math.atan2(float(a[0] * b[1] - a[1] * b[0]), float(a @ b))


@dataclass
class PiecewiseCurve:
    """Concatenation of regular arcs; ``closed`` adds the joint from the last
    arc back to the first."""

    arcs: list
    closed: bool = False
    external_angles: list = field(init=False)
    signed_external_angles: list = field(init=False)

    def __post_init__(self):
        if isinstance(self.arcs, ParamCurve):
            self.arcs = [self.arcs]
        if not self.arcs:
            raise InputError("a piecewise curve needs at least one arc")
        dims = {a.dim for a in self.arcs}
        if len(dims) != 1:
            raise InputError("all arcs must live in the same space")
        self.dim = dims.pop()
        joints = list(zip(self.arcs[:-1], self.arcs[1:]))
        if self.closed:
            joints.append((self.arcs[-1], self.arcs[0]))
        self.external_angles, self.signed_external_angles = [], []
        for inc, out in joints:
            p_end, p_start = inc.point(inc.domain[1]), out.point(out.domain[0])
            scale = max(1.0, float(np.linalg.norm(p_end)))
            if np.linalg.norm(p_end - p_start) > JOINT_TOL * scale:
                raise InputError("consecutive arc endpoints do not coincide")
            v_in, v_out = inc.deriv(inc.domain[1], 1), out.deriv(out.domain[0], 1)
            self.external_angles.append(_angle(v_in, v_out))
            self.signed_external_angles.append(_signed_angle(v_in, v_out) if self.dim == 2 else None)

    @classmethod
    def from_curve(cls, c: ParamCurve) -> "PiecewiseCurve":
        return cls([c], closed=c.closed)


def _as_piecewise(c) -> PiecewiseCurve:
    return c if isinstance(c, PiecewiseCurve) else PiecewiseCurve.from_curve(c)


def _kappa_speed(c: ParamCurve, t: float) -> float:
    d1, d2 = c.deriv(t, 1), c.deriv(t, 2)
    sp2 = float(d1 @ d1)
    if c.dim == 2:
        return abs(float(d1[0] * d2[1] - d1[1] * d2[0])) / sp2
    return float(np.linalg.norm(np.cross(d1, d2))) / sp2


def _skappa_speed(c: ParamCurve, t: float) -> float:
    d1, d2 = c.deriv(t, 1), c.deriv(t, 2)
    return float(d1[0] * d2[1] - d1[1] * d2[0]) / float(d1 @ d1)


def total_curvature(c, tol: Tolerances = DEFAULT_TOL) -> float:
    """Integral of curvature over each arc plus the external angles at joints."""
    pc = _as_piecewise(c)
    smooth = sum(numeric.integrate(lambda t, a=a: _kappa_speed(a, t), *a.domain, tol) for a in pc.arcs)
    return smooth + sum(pc.external_angles)


def total_signed_curvature(c, tol: Tolerances = DEFAULT_TOL) -> float:
    """Integral of signed curvature plus signed external angles (plane only)."""
    pc = _as_piecewise(c)
    if pc.dim != 2:
        raise NotPlanar("signed total curvature is defined for plane curves")
    for th in pc.external_angles:
        if abs(th - math.pi) <= CUSP_TOL:
            raise CuspError("a joint turns exactly backward; signed angle undefined")
    smooth = sum(numeric.integrate(lambda t, a=a: _skappa_speed(a, t), *a.domain, tol) for a in pc.arcs)
    return smooth + sum(pc.signed_external_angles)


def polyline_total_curvature(points, closed: bool = False) -> float:
    """Sum of external angles of a polygonal line."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise InputError("need at least three points")
    if closed and np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    edges = np.diff(np.vstack([pts, pts[:1]]) if closed else pts, axis=0)
    if np.any(np.linalg.norm(edges, axis=1) == 0):
        raise DegenerateVertex("consecutive points coincide")
    pairs = zip(edges, np.roll(edges, -1, axis=0)) if closed else zip(edges[:-1], edges[1:])
    return float(sum(_angle(a, b) for a, b in pairs))


def inscribed_polyline(c: ParamCurve, n: int) -> np.ndarray:
    """Vertices of the polyline through ``n`` equally spaced parameters."""
    a, b = c.domain
    if c.closed:
        return c.points(a + c.period * np.arange(n) / n)
    return c.points(np.linspace(a, b, n))


def _projection_samples(c: ParamCurve) -> np.ndarray:
    a, b = c.domain
    return c.points(np.linspace(a, b, PROJECTION_SAMPLES + 1))


def plane_directions(n: int) -> np.ndarray:
    phi = math.pi * np.arange(n) / n
    return np.column_stack([np.cos(phi), np.sin(phi)])


def sphere_directions(n: int) -> np.ndarray:
    """Fibonacci spiral points on the unit sphere."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def crofton_length_plane(c: ParamCurve, n_dirs: int = 256) -> float:
    """Length of a plane curve as pi/2 times the mean length of its
    projections to lines."""
    if c.dim != 2:
        raise NotPlanar("plane Crofton estimator needs a plane curve")
    steps = np.diff(_projection_samples(c), axis=0)
    total = 0.0
    for chunk in np.array_split(plane_directions(n_dirs), max(1, n_dirs // 256)):
        total += float(np.abs(steps @ chunk.T).sum())
    return 0.5 * math.pi * total / n_dirs


def crofton_length_space(c: ParamCurve, mode: str = "line", n_dirs: int = 4096) -> float:
    """Length of a space curve from projections to lines (factor 2) or to
    planes (factor 4/pi) over a Fibonacci direction set."""
    if c.dim != 3:
        raise InputError("space Crofton estimator needs a space curve")
    if mode not in ("line", "plane"):
        raise InputError("mode must be 'line' or 'plane'")
    steps = np.diff(_projection_samples(c), axis=0)
    sq = np.einsum("ij,ij->i", steps, steps)
    total = 0.0
    for chunk in np.array_split(sphere_directions(n_dirs), max(1, n_dirs // 256)):
        proj = steps @ chunk.T
        if mode == "line":
            total += float(np.abs(proj).sum())
        else:
            total += float(np.sqrt(np.maximum(sq[:, None] - proj * proj, 0.0)).sum())
    k = 2.0 if mode == "line" else 4.0 / math.pi
    return k * total / n_dirs


def winding_numbers(boundary: np.ndarray, pts: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Winding number of a closed polygon around each query point."""
    out = np.empty(len(pts))
    nxt = np.roll(boundary, -1, axis=0)
    for i in range(0, len(pts), chunk):
        q = pts[i : i + chunk, None, :]
        a, b = boundary[None] - q, nxt[None] - q
        cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
        out[i : i + chunk] = np.arctan2(cross, dot).sum(axis=1) / (2 * math.pi)
    return out


def max_inscribed_disc(c: ParamCurve, grid_n: int = 100, boundary_samples: int = 8192):
    """Largest disc centred on an interior grid point; returns (center, radius).

    The radius is the distance from the best centre to a dense boundary
    sample, so it approximates the inradius from below up to the grid
    spacing.
    """
    if c.dim != 2:
        raise NotPlanar("inscribed discs are computed for plane curves")
    if not c.closed:
        raise NotClosed("inscribed discs need a closed curve")
    boundary = c.points(c.sample_params(boundary_samples))
    lo, hi = boundary.min(axis=0), boundary.max(axis=0)
    xs, ys = np.linspace(lo[0], hi[0], grid_n), np.linspace(lo[1], hi[1], grid_n)
    grid = np.array(np.meshgrid(xs, ys)).reshape(2, -1).T
    tree = cKDTree(boundary)
    dist, _ = tree.query(grid)
    # a coarser polygon is enough for interiority away from the guard band
    coarse = boundary[:: max(1, boundary_samples // 1024)]
    wn = np.abs(winding_numbers(coarse, grid))
    inside = (wn > 0.5) & (dist > 1e-6)
    if not np.any(inside):
        raise NoInteriorPoint("no grid point lies inside the curve")
    best = int(np.argmax(np.where(inside, dist, -1.0)))
    return grid[best], float(dist[best])


def is_convex(c: ParamCurve, samples: int = 2048) -> bool:
    """True when the sampled signed curvature never changes sign."""
    if c.dim != 2:
        raise NotPlanar("convexity is tested for plane curves")
    k = np.array([signed_curvature(c, t) for t in c.sample_params(samples)])
    eps = 1e-9 * max(1.0, float(np.max(np.abs(k))))
    return not (np.any(k > eps) and np.any(k < -eps))


def end_distance(c: ParamCurve) -> float:
    return float(np.linalg.norm(c.point(c.domain[1]) - c.point(c.domain[0])))
