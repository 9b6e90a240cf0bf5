"""Polar charts, Jacobi residuals, Rauch comparison, model triangles and
hinges, fat/thin triangle tests, Alexandrov's lemma and Busemann functions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ConfigurationMismatch,
    GridTooCoarse,
    InputError,
    LeftDomain,
    RayNotMinimizing,
    ShootFailure,
    TriangleInequalityViolation,
)
from .geodesics import (
    ShortestPathMesh,
    _mesh_region,
    exp_map,
    geodesic_shoot,
    log_map,
    tangent_basis,
)
from .numeric import DEFAULT_TOL, StepUnderflow, Tolerances
from .surfaces import Surface, gauss_curvature

# radii (intrinsic) inside which builtin comparison tests are run
RELIABLE_RADIUS = {"sphere": 1.2, "torus": 0.4, "saddle": 1.0}
COS_GUARD = 1e-12

# fourth-order stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


# ---------------------------------------------------------------------------
# polar charts and the Jacobi equation


@dataclass
class PolarChart:
    """Geodesic polar coordinates around ``p``.

    ``points[i, j]`` is exp_p(r_i (cos th_j e1 + sin th_j e2)); ``b`` is the
    length of the theta-derivative of that map. Columns whose rays failed
    are masked with NaN and listed in ``failures``.
    """

    surface: Surface
    p: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    points: np.ndarray
    s_r: np.ndarray
    s_theta: np.ndarray
    b: np.ndarray
    chart_ids: np.ndarray
    coords: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    def radial_speed_error(self) -> float:
        return float(np.nanmax(np.abs(np.linalg.norm(self.s_r, axis=-1) - 1.0)))

    def gauss_lemma_error(self) -> float:
        """max |<s_theta, s_r>| over the grid."""
        return float(np.nanmax(np.abs(np.sum(self.s_theta * self.s_r, axis=-1))))

    def b_rr(self) -> np.ndarray:
        """Second r-derivative of b on interior nodes (NaN elsewhere)."""
        out = np.full_like(self.b, np.nan)
        acc = 0.0
        for k, w in enumerate(_D2):
            acc = acc + w * self.b[k : len(self.r) - 4 + k]
        out[2:-2] = acc / self.dr**2
        return out

    def b_r(self) -> np.ndarray:
        out = np.full_like(self.b, np.nan)
        acc = 0.0
        for k, w in enumerate(_D1):
            acc = acc + w * self.b[k : len(self.r) - 4 + k]
        out[2:-2] = acc / self.dr
        return out

    def extrinsic_K(self) -> np.ndarray:
        K = np.full(self.b.shape, np.nan)
        for i in range(self.b.shape[0]):
            for j in range(self.b.shape[1]):
                if np.isfinite(self.b[i, j]):
                    ch = self.surface.charts[int(self.chart_ids[i, j])]
                    K[i, j] = float(gauss_curvature(ch, *self.coords[i, j]))
        return K

    def first_zero(self) -> Optional[float]:
        """Smallest radius where b nearly vanishes at an interior local
        minimum (an indicator bounding the injectivity radius from above,
        not a certificate)."""
        best = None
        for j in range(self.b.shape[1]):
            col = self.b[:, j]
            if not np.all(np.isfinite(col)):
                continue
            scale = np.max(col)
            for i in range(1, len(col) - 1):
                if col[i] <= col[i - 1] and col[i] <= col[i + 1] and col[i] < 1e-2 * scale:
                    best = self.r[i] if best is None else min(best, self.r[i])
                    break
        return None if best is None else float(best)


def polar_chart(
    surf: Surface,
    p,
    r_max: float,
    n_r: int = 200,
    n_theta: int = 64,
    tol: Tolerances = DEFAULT_TOL,
    basis=None,
) -> PolarChart:
    """Shoot ``n_theta`` unit-speed rays from p and sample them at
    r_i = i r_max / n_r; b = |s_theta| with s_theta from spectral
    differentiation of the periodic theta samples."""
    p = np.asarray(p, dtype=float)
    e1, e2, _ = tangent_basis(surf, p) if basis is None else basis
    r = r_max * np.arange(1, n_r + 1) / n_r
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    pts = np.full((n_r, n_theta, 3), np.nan)
    vel = np.full((n_r, n_theta, 3), np.nan)
    ids = np.zeros((n_r, n_theta), dtype=int)
    coords = np.full((n_r, n_theta, 2), np.nan)
    failures = []
    for j, th in enumerate(theta):
        w = math.cos(th) * e1 + math.sin(th) * e2
        try:
            path = geodesic_shoot(surf, p, w, r_max, tol, t_stops=r)
        except (LeftDomain, StepUnderflow) as exc:
            failures.append((float(th), str(exc)))
            continue
        idx = np.searchsorted(path.times, r)
        if np.any(idx >= len(path.times)) or np.max(np.abs(path.times[np.minimum(idx, len(path.times) - 1)] - r)) > 1e-12 * r_max:
            failures.append((float(th), "ray ended early"))
            continue
        pts[:, j] = path.points[idx]
        vel[:, j] = path.velocities[idx]
        ids[:, j] = path.chart_ids[idx]
        coords[:, j] = path.chart_coords[idx]
    if len(failures) == n_theta:
        raise ShootFailure("every ray of the polar chart failed")
    s_theta = _spectral_theta_derivative(pts) if not failures else _fd_theta_derivative(pts, theta[1] - theta[0])
    b = np.linalg.norm(s_theta, axis=-1)
    return PolarChart(surf, p, r, theta, pts, vel, s_theta, b, ids, coords, failures)


def _spectral_theta_derivative(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1]
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    spec = np.fft.fft(pts, axis=1) * (1j * k)[None, :, None]
    return np.real(np.fft.ifft(spec, axis=1))


def _fd_theta_derivative(pts: np.ndarray, dth: float) -> np.ndarray:
    # fourth-order centred differences; NaN columns stay local
    return sum(w * np.roll(pts, 2 - k, axis=1) for k, w in enumerate(_D1) if w) / dth


def jacobi_residual(pc: PolarChart, surf: Optional[Surface] = None, tol: Tolerances = DEFAULT_TOL) -> float:
    """max |b_rr + K b| over interior nodes, K from the surface."""
    brr = pc.b_rr()
    K = pc.extrinsic_K()
    res = np.abs(brr + K * pc.b)
    val = float(np.nanmax(res))
    # fourth differences of a smooth b are O(dr^4); anything larger is noise,
    # which the second-difference stencil amplifies by about 5 / dr^2
    d4 = np.abs(np.diff(pc.b, n=4, axis=0))
    eps_b = float(np.nanmax(d4)) / 6 if d4.size else 0.0
    noise = 16 * eps_b / (3 * pc.dr**2)
    if noise > max(0.1 * val, 1e-4):
        warnings.warn(f"second differences are noise dominated (noise ~{noise:.1e})", GridTooCoarse, stacklevel=2)
    return val


def egregium_discrepancy(pc: PolarChart, b_floor: float = 0.05) -> float:
    """max |(-b_rr / b) - K| at interior nodes with b above ``b_floor``."""
    brr = pc.b_rr()
    K = pc.extrinsic_K()
    mask = np.isfinite(brr) & (pc.b > b_floor)
    return float(np.max(np.abs(-brr[mask] / pc.b[mask] - K[mask])))


def rauch_compare(surf: Surface, p, tilde_curve: Callable, n: int = 512, tol: Tolerances = DEFAULT_TOL, basis=None):
    """(length of the tangent-plane curve, length of its exp_p image).

    ``tilde_curve(t)`` for t in [0, 1] returns coordinates (a, b) in the
    orthonormal tangent basis at p. Lengths are Richardson-extrapolated
    polyline lengths on n and n/2 samples.
    """
    p = np.asarray(p, dtype=float)
    e1, e2, _ = tangent_basis(surf, p) if basis is None else basis
    ts = np.linspace(0.0, 1.0, n + 1)
    flat = np.array([np.asarray(tilde_curve(t), dtype=float) for t in ts])
    img = np.array([exp_map(surf, p, x[0] * e1 + x[1] * e2, tol) for x in flat])

    def rich(P):
        fine = np.linalg.norm(np.diff(P, axis=0), axis=1).sum()
        coarse = np.linalg.norm(np.diff(P[::2], axis=0), axis=1).sum()
        return float((4 * fine - coarse) / 3)

    return rich(flat), rich(img)


# ---------------------------------------------------------------------------
# model triangles and hinges


def _clamped_acos(c: float) -> float:
    return math.acos(max(-1.0, min(1.0, c)))


def model_angle(a: float, b: float, c: float) -> float:
    """Angle between sides a and b of the plane triangle with sides a, b, c."""
    if a <= 0 or b <= 0:
        return 0.0
    return _clamped_acos((a * a + b * b - c * c) / (2 * a * b))


@dataclass(frozen=True)
class ModelTriangle:
    """Plane triangle with sides a, b, c; ``angles[k]`` is opposite side k."""

    a: float
    b: float
    c: float
    angles: tuple
    degenerate: bool

    def vertices(self) -> np.ndarray:
        """Plane vertices (A, B, C) with A at the origin and B on the x-axis;
        side a = |BC|, b = |CA|, c = |AB|."""
        A = np.zeros(2)
        B = np.array([self.c, 0.0])
        al = self.angles[0]
        C = self.b * np.array([math.cos(al), math.sin(al)])
        return np.array([A, B, C])


def model_triangle(a: float, b: float, c: float) -> ModelTriangle:
    """Model triangle by the cosine rule. Degenerate (collinear) triangles
    are accepted with a flag."""
    sides = np.array([a, b, c], dtype=float)
    if np.any(sides < 0):
        raise InputError("side lengths must be nonnegative")
    slack = 1e-12 * max(1.0, float(sides.max()))
    for k in range(3):
        if sides[k] > sides.sum() - sides[k] + slack:
            raise TriangleInequalityViolation(f"side {sides[k]} exceeds the sum of the other two")
    al = model_angle(b, c, a)
    be = model_angle(c, a, b)
    ga = math.pi - al - be
    degenerate = bool(min(al, be, ga) <= 1e-9 or sides.max() >= sides.sum() - sides.max() - slack)
    return ModelTriangle(float(a), float(b), float(c), (al, be, max(0.0, ga)), degenerate)


@dataclass(frozen=True)
class Hinge:
    """Hinge at ``vertex`` with sides towards two other points."""

    vertex: np.ndarray
    side_lengths: tuple
    measured: float
    model: float


def _angle_between(a, b) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    c = float(a @ b) / (na * nb)
    return math.acos(max(-1.0 + COS_GUARD, min(1.0 - COS_GUARD, c))) if abs(c) < 1 - COS_GUARD else (0.0 if c > 0 else math.pi)


@dataclass
class GeodesicTriangle:
    vertices: list
    sides: list  # tangent vectors: log_x(y), log_y(z), log_z(x)
    lengths: tuple  # |xy|, |yz|, |zx|
    hinges: list


def geodesic_triangle(surf: Surface, x, y, z, r_max: float, tol: Tolerances = DEFAULT_TOL) -> GeodesicTriangle:
    """Sides by the logarithmic map; the reverse direction at each endpoint
    comes from the final velocity of the shot side."""
    P = [np.asarray(v, dtype=float) for v in (x, y, z)]
    out_dirs = [None] * 3  # direction at vertex k towards vertex k+1
    in_dirs = [None] * 3  # direction at vertex k+1 towards vertex k
    lengths = []
    for k in range(3):
        a, b = P[k], P[(k + 1) % 3]
        w = log_map(surf, a, b, r_max, tol)
        end_vel = geodesic_shoot(surf, a, w, 1.0, tol, dense=False).final_velocity
        out_dirs[k] = w
        in_dirs[(k + 1) % 3] = -end_vel
        lengths.append(float(np.linalg.norm(w)))
    # opposite-side lengths: vertex k faces side (k+1, k+2)
    hinges = []
    for k in range(3):
        to_next, to_prev = out_dirs[k], in_dirs[k]
        l_next, l_prev = lengths[k], lengths[(k + 2) % 3]
        opposite = lengths[(k + 1) % 3]
        measured = _angle_between(to_next, to_prev)
        hinges.append(Hinge(P[k], (l_next, l_prev), measured, model_angle(l_next, l_prev, opposite)))
    return GeodesicTriangle(P, out_dirs, tuple(lengths), hinges)


def hinge_compare(surf: Surface, x, y, z, r_max: float, tol: Tolerances = DEFAULT_TOL):
    """Per-vertex (measured, model) angle pairs of the geodesic triangle xyz."""
    tri = geodesic_triangle(surf, x, y, z, r_max, tol)
    return [(h.measured, h.model) for h in tri.hinges]


def _side_point(surf: Surface, a, w, frac: float, tol: Tolerances) -> np.ndarray:
    return exp_map(surf, a, frac * np.asarray(w), tol)


def triangle_fatness(
    surf: Surface,
    x,
    y,
    z,
    n_pairs: int = 10,
    r_max: float = 1.0,
    mesh_n: int = 128,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
    mesh: Optional[ShortestPathMesh] = None,
):
    """(min, max) over random side-point pairs of d(p, q) - |p~ q~|.

    Side points are matched with the model triangle by arc-length fraction;
    d is measured with the mesh shortest-path oracle.
    """
    tri = geodesic_triangle(surf, x, y, z, r_max, tol)
    m = model_triangle(tri.lengths[1], tri.lengths[2], tri.lengths[0])
    V = m.vertices()  # A = x~, B = y~, C = z~ since c = |xy|, b = |zx|
    flat = [(V[0], V[1]), (V[1], V[2]), (V[2], V[0])]
    if mesh is None:
        pts = np.array(tri.vertices)
        region = _union_region(surf, [_mesh_region(surf, a, b) for a in pts for b in pts if a is not b])
        mesh = ShortestPathMesh(surf, mesh_n, region)
    rng = np.random.default_rng(seed)
    diffs = []
    for _ in range(n_pairs):
        i, j = rng.choice(3, size=2, replace=False)
        s, t = rng.uniform(0.05, 0.95, size=2)
        p = _side_point(surf, tri.vertices[i], tri.sides[i], s, tol)
        q = _side_point(surf, tri.vertices[j], tri.sides[j], t, tol)
        pt = flat[i][0] + s * (flat[i][1] - flat[i][0])
        qt = flat[j][0] + t * (flat[j][1] - flat[j][0])
        d, _ = mesh.query(p, q)
        diffs.append(d - float(np.linalg.norm(pt - qt)))
    return float(min(diffs)), float(max(diffs))


def _union_region(surf: Surface, regions):
    ch = surf.global_chart
    r = np.array(regions)
    out = [r[:, 0].min(), r[:, 1].max(), r[:, 2].min(), r[:, 3].max()]
    if ch.uperiod:
        out[0], out[1] = ch.udomain
    if ch.vperiod:
        out[2], out[3] = ch.vdomain
    return tuple(out)


def comparison_record(surf: Surface, x, y, z, r_max: float, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Report entry {triangle, measured_angles, model_angles, verdict_margin}.

    The margin is min(measured - model) for K >= 0 surfaces and
    min(model - measured) for K <= 0; positive means the comparison holds.
    """
    pairs = hinge_compare(surf, x, y, z, r_max, tol)
    meas = [m for m, _ in pairs]
    mod = [m for _, m in pairs]
    sign = surf.sign_K if surf.sign_K is not None else 1
    if sign >= 0:
        margin = min(a - b for a, b in pairs)
    else:
        margin = min(b - a for a, b in pairs)
    return {
        "triangle": [list(map(float, v)) for v in (x, y, z)],
        "measured_angles": meas,
        "model_angles": mod,
        "verdict_margin": float(margin),
    }


# ---------------------------------------------------------------------------
# Alexandrov's lemma


def _hinge_angle(at, a, b) -> float:
    """Angle at ``at`` between the directions to a and b."""
    return _angle_between(np.asarray(a, float) - at, np.asarray(b, float) - at)


def _sign(x: float, eps: float) -> int:
    return 0 if abs(x) <= eps else (1 if x > 0 else -1)


def alexandrov_signs(p, x, y, z, p2, x2, y2, z2, eps: float = 1e-9):
    """Sign triple for two plane quadrilaterals [pxyz], [p'x'y'z'] with equal
    corresponding sides and y' on the segment [x', z']:

    (|p - y| - |p' - y'|, angle(x; p, y) - angle(x'; p', y'),
    pi - angle(y; p, x) - angle(y; p, z)), where angle(v; a, b) is the angle
    at v between a and b. The three signs agree; a disagreement raises.
    """
    P = [np.asarray(v, dtype=float) for v in (p, x, y, z)]
    Q = [np.asarray(v, dtype=float) for v in (p2, x2, y2, z2)]
    scale = max(1.0, max(float(np.abs(v).max()) for v in P + Q))
    for k in range(4):
        a, b = k, (k + 1) % 4
        if abs(np.linalg.norm(P[a] - P[b]) - np.linalg.norm(Q[a] - Q[b])) > 1e-9 * scale:
            raise ConfigurationMismatch("corresponding sides differ")
    xz = Q[3] - Q[1]
    xy = Q[2] - Q[1]
    cross = abs(xz[0] * xy[1] - xz[1] * xy[0])
    along = float(xy @ xz) / float(xz @ xz) if float(xz @ xz) > 0 else -1.0
    if cross > 1e-9 * scale * scale or not (-1e-12 <= along <= 1 + 1e-12):
        raise ConfigurationMismatch("y' must lie on the segment [x', z']")
    p, x, y, z = P
    p2, x2, y2, z2 = Q
    vals = (
        float(np.linalg.norm(p - y) - np.linalg.norm(p2 - y2)),
        _hinge_angle(x, p, y) - _hinge_angle(x2, p2, y2),
        math.pi - _hinge_angle(y, p, x) - _hinge_angle(y, p, z),
    )
    signs = tuple(_sign(v, eps * scale) for v in vals)
    if len(set(signs)) != 1:
        raise ConfigurationMismatch(f"sign triple {signs} disagrees (values {vals})")
    return signs


# ---------------------------------------------------------------------------
# Busemann functions


@dataclass(frozen=True)
class BusemannValue:
    value: float  # Richardson estimate 2 f(T) - f(T/2)
    at_T: float  # f(T) = d(ray(T), x) - T
    at_half: float  # f(T/2)
    slow: bool  # extrapolation moved the value by more than 1e-3
    monotone: bool  # f(T) <= f(T/2)


def busemann(
    ray: Callable[[float], np.ndarray],
    x,
    T: float,
    distance: Callable,
) -> BusemannValue:
    """Approximate bus(x) = lim d(ray(t), x) - t from t = T/2 and t = T.

    ``ray(t)`` returns the point at arc length t; ``distance(a, b)`` is the
    intrinsic distance. The correction d^2/(2t) decays like 1/t, hence the
    weights (2, -1).
    """
    x = np.asarray(x, dtype=float)
    fT = distance(ray(T), x) - T
    fh = distance(ray(T / 2), x) - T / 2
    est = 2 * fT - fh
    return BusemannValue(float(est), float(fT), float(fh), abs(est - fT) > 1e-3, fT <= fh + 1e-9)


def check_ray_minimizing(surf: Surface, ray: Callable, T: float, n: int = 128, rel: float = 0.01) -> float:
    """Mesh distance between ray(0) and ray(T); raises RayNotMinimizing if
    it is shorter than T by more than ``rel``."""
    from .geodesics import mesh_shortest_path

    d, _ = mesh_shortest_path(surf, ray(0.0), ray(T), n)
    if d < (1 - rel) * T:
        raise RayNotMinimizing(f"mesh distance {d:.6g} is shorter than the ray length {T:.6g}")
    return d


def surface_ray(surf: Surface, p, v, T: float, tol: Tolerances = DEFAULT_TOL) -> Callable:
    """Unit-speed geodesic ray from p in direction v, as arc length -> point."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    path = geodesic_shoot(surf, p, v, T, tol, max_step=0.02)
    return path.point_at


def log_distance(surf: Surface, r_max: float, tol: Tolerances = DEFAULT_TOL) -> Callable:
    """Intrinsic distance by the logarithmic map (valid within r_max)."""

    def d(a, b):
        if np.linalg.norm(np.asarray(a) - np.asarray(b)) == 0:
            return 0.0
        return float(np.linalg.norm(log_map(surf, a, b, r_max, tol)))

    return d
