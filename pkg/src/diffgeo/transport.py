"""Parallel transport, holonomy, geodesic curvature and Gauss-Bonnet checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import numeric
from .errors import CuspError, InputError, NotRegular, NotTangent, ToleranceNotMet
from .numeric import DEFAULT_TOL, Tolerances
from .surfaces import Chart, Surface, area_element, chart_integral, gauss_curvature, integral_gauss

JOINT_TOL = 1e-7
CUSP_TOL = 1e-9


# ---------------------------------------------------------------------------
# curves on surfaces


@dataclass
class CurvePiece:
    """One smooth arc t -> (u(t), v(t)) in chart ``chart_id``."""

    chart_id: int
    domain: tuple
    uv: Callable
    duv: Optional[Callable] = None
    d2uv: Optional[Callable] = None

    def jet(self, t: float, tol: Tolerances = DEFAULT_TOL):
        x = np.asarray(self.uv(t), dtype=float)
        d1 = numeric.derivative(self.uv, t, 1, tol, analytic=self.duv)
        d2 = numeric.derivative(self.uv, t, 2, tol, analytic=self.d2uv)
        return x, np.asarray(d1, dtype=float), np.asarray(d2, dtype=float)


def _signed_angle(a, b, N) -> float:
    return math.atan2(float(np.cross(a, b) @ N), float(a @ b))


class OnSurfaceCurve:
    """Piecewise smooth curve on a surface given by chart coordinates.

    Signed external angles at joints are measured in the tangent plane,
    positive for left turns with respect to the chart normal.
    """

    def __init__(self, surface: Surface, pieces: Sequence[CurvePiece], closed: bool = False, tol: Tolerances = DEFAULT_TOL):
        if not pieces:
            raise InputError("a curve needs at least one piece")
        self.surface = surface
        self.pieces = list(pieces)
        self.closed = closed
        self.tol = tol
        joints = list(range(len(self.pieces) - 1)) + ([len(self.pieces) - 1] if closed else [])
        self.external_angles = []
        for k in joints:
            a, b = self.pieces[k], self.pieces[(k + 1) % len(self.pieces)]
            p_end, p_start = self.point(k, a.domain[1]), self.point((k + 1) % len(self.pieces), b.domain[0])
            if np.linalg.norm(p_end - p_start) > JOINT_TOL * max(1.0, float(np.linalg.norm(p_end))):
                raise InputError(f"pieces {k} and {k + 1} do not meet")
            v_in = self.velocity(k, a.domain[1])
            v_out = self.velocity((k + 1) % len(self.pieces), b.domain[0])
            N = self.normal(k, a.domain[1])
            self.external_angles.append(_signed_angle(v_in, v_out, N))

    # --- evaluation -------------------------------------------------------
    def chart(self, k: int) -> Chart:
        return self.surface.charts[self.pieces[k].chart_id]

    def point(self, k: int, t: float) -> np.ndarray:
        u, v = self.pieces[k].uv(t)
        return self.chart(k).point(u, v)

    def normal(self, k: int, t: float) -> np.ndarray:
        u, v = self.pieces[k].uv(t)
        return self.chart(k).normal(u, v)

    def jet(self, k: int, t: float):
        """(point, velocity, acceleration, unit normal) at t on piece k."""
        ch = self.chart(k)
        (u, v), (du, dv), (ddu, ddv) = self.pieces[k].jet(t, self.tol)
        su, sv = ch.partials(u, v)
        suu, suv, svv = ch.second(u, v)
        n = np.cross(su, sv)
        vel = su * du + sv * dv
        acc = su * ddu + sv * ddv + suu * du * du + 2 * suv * du * dv + svv * dv * dv
        return ch.point(u, v), vel, acc, n / np.linalg.norm(n)

    def velocity(self, k: int, t: float) -> np.ndarray:
        return self.jet(k, t)[1]

    @property
    def start(self) -> np.ndarray:
        return self.point(0, self.pieces[0].domain[0])

    @property
    def end(self) -> np.ndarray:
        return self.point(len(self.pieces) - 1, self.pieces[-1].domain[1])

    def reversed(self) -> "OnSurfaceCurve":
        """Same trace traversed backwards."""
        out = []
        for pc in reversed(self.pieces):
            a, b = pc.domain
            flip = lambda f, sgn=1.0: None if f is None else (lambda t, f=f: sgn * np.asarray(f(a + b - t)))
            out.append(CurvePiece(pc.chart_id, (a, b), lambda t, f=pc.uv: f(a + b - t), flip(pc.duv, -1.0), flip(pc.d2uv)))
        return OnSurfaceCurve(self.surface, out, self.closed, self.tol)

    def sample(self, n_per_piece: int = 64) -> np.ndarray:
        pts = []
        for k, pc in enumerate(self.pieces):
            for t in np.linspace(*pc.domain, n_per_piece):
                pts.append(self.point(k, t))
        return np.array(pts)

    # --- constructors -----------------------------------------------------
    @classmethod
    def from_uv(cls, surface, chart_id, uv, domain, duv=None, d2uv=None, closed=False, tol=DEFAULT_TOL):
        return cls(surface, [CurvePiece(chart_id, tuple(domain), uv, duv, d2uv)], closed, tol)

    @classmethod
    def from_ambient_piece(cls, surface, chart_id, gamma, domain, d1=None, d2=None, tol=DEFAULT_TOL) -> CurvePiece:
        """Piece for an ambient curve known to lie on the surface; chart
        coordinates come from the chart inverse, their derivatives from the
        ambient ones by least squares."""
        ch = surface.charts[chart_id]
        if ch.inverse is None:
            raise InputError(f"chart {ch.name} has no inverse")
        ref = ch.inverse(np.asarray(gamma(domain[0]), dtype=float))

        def uv(t):
            u, v = ch.inverse(np.asarray(gamma(t), dtype=float))
            # keep periodic coordinates continuous with the start value
            if ch.uperiod:
                u = ref[0] + ((u - ref[0] + ch.uperiod / 2) % ch.uperiod) - ch.uperiod / 2
            if ch.vperiod:
                v = ref[1] + ((v - ref[1] + ch.vperiod / 2) % ch.vperiod) - ch.vperiod / 2
            return np.array([u, v])

        def g1(t):
            return numeric.derivative(gamma, t, 1, tol, analytic=d1)

        def g2(t):
            return numeric.derivative(gamma, t, 2, tol, analytic=d2)

        def duv(t):
            u, v = uv(t)
            su, sv = ch.partials(u, v)
            x, *_ = np.linalg.lstsq(np.column_stack([su, sv]), g1(t), rcond=None)
            return x

        def d2uv(t):
            u, v = uv(t)
            du, dv = duv(t)
            su, sv = ch.partials(u, v)
            suu, suv, svv = ch.second(u, v)
            rest = g2(t) - (suu * du * du + 2 * suv * du * dv + svv * dv * dv)
            x, *_ = np.linalg.lstsq(np.column_stack([su, sv]), rest, rcond=None)
            return x

        return CurvePiece(chart_id, tuple(domain), uv, duv, d2uv)

    @classmethod
    def from_ambient(cls, surface, chart_id, gamma, domain, d1=None, d2=None, closed=False, tol=DEFAULT_TOL):
        return cls(surface, [cls.from_ambient_piece(surface, chart_id, gamma, domain, d1, d2, tol)], closed, tol)

    @classmethod
    def from_periodic_samples(cls, surface, chart_id, uv_samples, tol=DEFAULT_TOL) -> "OnSurfaceCurve":
        """Closed curve through chart samples taken at t = 2 pi k / n, by
        trigonometric interpolation (spectrally accurate for smooth loops)."""
        ch = surface.charts[chart_id]
        uvs = np.array(uv_samples, dtype=float)
        for k, per in ((0, ch.uperiod), (1, ch.vperiod)):
            if per:
                uvs[:, k] = np.unwrap(uvs[:, k], period=per)
        n = len(uvs)
        if n < 8:
            raise InputError("need at least 8 samples")
        c = np.fft.fft(uvs, axis=0) / n
        freq = np.fft.fftfreq(n, 1.0 / n)
        if n % 2 == 0:
            c[n // 2] = 0.0

        def ev(t, order):
            e = np.exp(1j * freq * t) * (1j * freq) ** order
            return np.real(e @ c)

        piece = CurvePiece(chart_id, (0.0, 2 * math.pi), lambda t: ev(t, 0), lambda t: ev(t, 1), lambda t: ev(t, 2))
        return cls(surface, [piece], True, tol)

    @classmethod
    def from_geodesic_piece(cls, path, T: float, tol: Tolerances = DEFAULT_TOL) -> list:
        """Pieces (one per chart segment) following a GeodesicPath on [0, T]."""
        from .geodesics import geodesic_rhs

        pieces = []
        for cid, seg in path.segments:
            a, b = seg.t0, min(seg.t1, T)
            if b <= a:
                continue
            ch = path.surface.charts[cid]
            rhs = geodesic_rhs(ch)
            pieces.append(
                CurvePiece(
                    cid,
                    (a, b),
                    lambda t, s=seg: s(t)[:2],
                    lambda t, s=seg: s(t)[2:],
                    lambda t, s=seg, r=rhs: r(t, s(t))[2:],
                )
            )
        return pieces

    @classmethod
    def concat(cls, curves: Sequence["OnSurfaceCurve"], closed: bool = False) -> "OnSurfaceCurve":
        pieces = [pc for c in curves for pc in c.pieces]
        return cls(curves[0].surface, pieces, closed, curves[0].tol)


def broken_geodesic(surface: Surface, vertices, r_max: float, closed: bool = True, tol: Tolerances = DEFAULT_TOL) -> OnSurfaceCurve:
    """Concatenation of geodesic sides through the given vertices (found
    with the logarithmic map)."""
    from .geodesics import geodesic_shoot, log_map

    vs = [np.asarray(v, dtype=float) for v in vertices]
    pairs = list(zip(vs[:-1], vs[1:])) + ([(vs[-1], vs[0])] if closed else [])
    pieces = []
    for a, b in pairs:
        w = log_map(surface, a, b, r_max, tol)
        path = geodesic_shoot(surface, a, w, 1.0, tol, max_step=0.02)
        pieces.extend(OnSurfaceCurve.from_geodesic_piece(path, 1.0, tol))
    return OnSurfaceCurve(surface, pieces, closed, tol)


# ---------------------------------------------------------------------------
# parallel transport


def normal_jet(ch: Chart, u: float, v: float):
    """Unit normal N and its partials N_u, N_v."""
    su, sv = ch.partials(u, v)
    suu, suv, svv = ch.second(u, v)
    n = np.cross(su, sv)
    nn = float(np.linalg.norm(n))
    N = n / nn
    n_u = np.cross(suu, sv) + np.cross(su, suv)
    n_v = np.cross(suv, sv) + np.cross(su, svv)
    return N, (n_u - (n_u @ N) * N) / nn, (n_v - (n_v @ N) * N) / nn


@dataclass
class TransportResult:
    times: list  # per piece
    vectors: list  # per piece, rows are ambient vectors
    v_end: np.ndarray

    def all_vectors(self) -> np.ndarray:
        return np.vstack(self.vectors)


def parallel_transport(c: OnSurfaceCurve, v0, tol: Tolerances = DEFAULT_TOL) -> TransportResult:
    """Transport v0 along c by v' = -<v, N'> N with re-projection to the
    tangent plane after each accepted step."""
    v = np.asarray(v0, dtype=float)
    k0 = 0
    N0 = c.normal(k0, c.pieces[0].domain[0])
    if abs(float(v @ N0)) > 1e-8 * max(1.0, float(np.linalg.norm(v))):
        raise NotTangent("initial vector is not tangent to the surface")
    v = v - (v @ N0) * N0
    times, vecs = [], []
    for k, pc in enumerate(c.pieces):
        ch = c.chart(k)

        def rhs(t, y, pc=pc, ch=ch):
            (u, w), d1, _ = pc.jet(t, tol)
            N, Nu, Nv = normal_jet(ch, u, w)
            dN = Nu * d1[0] + Nv * d1[1]
            return -(y @ dN) * N

        def project(t, y, pc=pc, ch=ch):
            u, w = pc.uv(t)
            N = ch.normal(u, w)
            return y - (y @ N) * N

        a, b = pc.domain
        path = numeric.ode_solve(rhs, a, v, b, tol, project=project, max_step=(b - a) / 16)
        times.append(np.asarray(path.times))
        vecs.append(np.asarray(path.values))
        v = path.final
    return TransportResult(times, vecs, v)


def holonomy(loop: OnSurfaceCurve, v0=None, tol: Tolerances = DEFAULT_TOL) -> float:
    """Counterclockwise angle in (-pi, pi] from v0 to its transport around
    the loop, measured with the surface orientation at the base point."""
    if not loop.closed:
        raise InputError("holonomy needs a closed loop")
    _, vel, _, N = loop.jet(0, loop.pieces[0].domain[0])
    v0 = vel / np.linalg.norm(vel) if v0 is None else np.asarray(v0, dtype=float)
    v1 = parallel_transport(loop, v0, tol).v_end
    ang = _signed_angle(v0, v1, N)
    return math.pi if ang <= -math.pi else ang


def geodesic_curvature(c: OnSurfaceCurve, t: float, k: int = 0) -> float:
    """k_g = <tangential acceleration, N x T> / |gamma'|^2."""
    _, vel, acc, N = c.jet(k, t)
    sp = float(np.linalg.norm(vel))
    if sp < 1e-10:
        raise NotRegular(f"curve is singular at t={t}")
    T = vel / sp
    a_tan = acc - (acc @ N) * N
    return float(a_tan @ np.cross(N, T)) / (sp * sp)


def total_geodesic_curvature(c: OnSurfaceCurve, tol: Tolerances = DEFAULT_TOL) -> float:
    """Sum of integrals of k_g ds over the pieces and signed external angles."""
    for th in c.external_angles:
        if abs(abs(th) - math.pi) <= CUSP_TOL:
            raise CuspError("a joint turns exactly backward")

    def integrand(k):
        def f(t):
            _, vel, acc, N = c.jet(k, t)
            sp = float(np.linalg.norm(vel))
            a_tan = acc - (acc @ N) * N
            return float(a_tan @ np.cross(N, vel / sp)) / sp

        return f

    smooth = sum(numeric.integrate(integrand(k), *pc.domain, tol) for k, pc in enumerate(c.pieces))
    return smooth + sum(c.external_angles)


def rotation_of_field(loop: OnSurfaceCurve, field: Optional[Callable] = None, tol: Tolerances = DEFAULT_TOL) -> float:
    """rot of a unit tangent field u around the loop: integral of <u', N x u>.

    ``field(chart, u, v)`` returns a tangent vector (normalized here); the
    default is the unit s_u field of each piece's chart. Transport around the
    loop is a clockwise rotation by this angle, so holonomy = -rot mod 2 pi.
    """
    if field is None:
        field = lambda ch, u, v: ch.partials(u, v)[0]

    def unit(k, t):
        u, v = loop.pieces[k].uv(t)
        w = np.asarray(field(loop.chart(k), u, v), dtype=float)
        return w / np.linalg.norm(w)

    total = 0.0
    for k, pc in enumerate(loop.pieces):

        def f(t, k=k):
            du = numeric.derivative(lambda s: unit(k, s), t, 1, tol)
            return float(du @ np.cross(loop.normal(k, t), unit(k, t)))

        total += numeric.integrate(f, *pc.domain, tol)
    return total


def wrap_angle(a: float) -> float:
    """Representative of a in (-pi, pi]."""
    r = math.remainder(a, 2 * math.pi)
    return math.pi if r <= -math.pi else r


# ---------------------------------------------------------------------------
# Gauss-Bonnet


class DiscRegion:
    """Disc in one chart, star-shaped about ``center`` in chart coordinates,
    bounded by a closed curve with the region on its left."""

    def __init__(self, boundary: OnSurfaceCurve, center=None, check_samples: int = 64):
        if not boundary.closed:
            raise InputError("disc boundary must be closed")
        ids = {pc.chart_id for pc in boundary.pieces}
        if len(ids) != 1:
            raise InputError("disc boundary must lie in a single chart")
        self.boundary = boundary
        self.chart_id = ids.pop()
        self.chart = boundary.surface.charts[self.chart_id]
        if center is None:
            pts = np.array([pc.uv(t) for pc in boundary.pieces for t in np.linspace(*pc.domain, check_samples, endpoint=False)])
            center = pts.mean(axis=0)
        self.center = np.asarray(center, dtype=float)
        for pc in boundary.pieces:
            for t in np.linspace(*pc.domain, check_samples):
                x, d1, _ = pc.jet(t)
                r = x - self.center
                if r[0] * d1[1] - r[1] * d1[0] <= 0:
                    raise InputError("boundary must be positively oriented and star-shaped about the centre")

    def integral_K(self, tol: Tolerances = DEFAULT_TOL, n0: int = 16, max_level: int = 7) -> float:
        """Integral of K dA through the map (rho, t) -> c + rho (uv(t) - c)."""
        prev = None
        n = n0
        ch, c = self.chart, self.center
        for _ in range(max_level):
            rho, wr = numeric.gauss_legendre(0.0, 1.0, n)
            est = 0.0
            for pc in self.boundary.pieces:
                ts, wt = numeric.composite_gauss(*pc.domain, max(1, n // 8))
                B = np.array([pc.uv(t) for t in ts]) - c
                dB = np.array([pc.jet(t)[1] for t in ts])
                jac = B[:, 0] * dB[:, 1] - B[:, 1] * dB[:, 0]
                U = c[0] + rho[:, None] * B[None, :, 0]
                V = c[1] + rho[:, None] * B[None, :, 1]
                vals = gauss_curvature(ch, U, V) * area_element(ch, U, V) * rho[:, None] * jac[None, :]
                est += float(wr @ vals @ wt)
            if prev is not None and abs(est - prev) <= max(1e-11, 10 * tol.quad_rel_tol * abs(est)):
                return est
            prev, n = est, 2 * n
        raise ToleranceNotMet(f"disc integral did not converge (last change {abs(est - prev):.2e})")


@dataclass(frozen=True)
class GBReport:
    tgc: float
    intK: float
    residual: float

    def as_dict(self):
        return {"tgc": self.tgc, "intK": self.intK, "residual": self.residual}


def gb_residual(d: DiscRegion, tol: Tolerances = DEFAULT_TOL) -> GBReport:
    """Total geodesic curvature of the boundary + integral of K - 2 pi."""
    tgc = total_geodesic_curvature(d.boundary, tol)
    ik = d.integral_K(tol)
    return GBReport(tgc, ik, tgc + ik - 2 * math.pi)


@dataclass(frozen=True)
class ChiReport:
    tgc: float
    intK: float
    chi_estimate: float

    def as_dict(self):
        return {"tgc": self.tgc, "intK": self.intK, "chi_estimate": self.chi_estimate}


def gb_general(surface: Surface, region=None, boundaries: Sequence[OnSurfaceCurve] = (), tol: Tolerances = DEFAULT_TOL) -> ChiReport:
    """Sum of boundary total geodesic curvatures plus the integral of K over
    a rectangle of the global chart (the whole surface when ``region`` is
    None), divided by 2 pi."""
    if region is None:
        ik = integral_gauss(surface, tol)
    else:
        ch = surface.global_chart
        ik = chart_integral(ch, region, lambda U, V: gauss_curvature(ch, U, V), tol)
    tgc = sum(total_geodesic_curvature(b, tol) for b in boundaries)
    return ChiReport(tgc, ik, (tgc + ik) / (2 * math.pi))
