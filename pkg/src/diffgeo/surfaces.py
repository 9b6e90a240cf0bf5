"""Charts, builtin surfaces and their curvature.

Orientation convention: the unit normal of a chart is ``s_u x s_v``
normalized. Builtin closed surfaces and surfaces of revolution are
parametrized so that this normal points toward the convex side (inward on
the sphere), which makes the sphere's principal curvatures positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import numeric
from .curves import ParamCurve
from .errors import AxisContact, InputError, IrregularPoint, NotTangent, ToleranceNotMet
from .expr import Expr
from .numeric import DEFAULT_TOL, Tolerances

REGULARITY_FLOOR = 1e-10
UMBILIC_TOL = 1e-9
SAFE_MARGIN = 0.05


def _stack(*cols):
    if all(np.ndim(c) == 0 for c in cols):
        return np.array([float(c) for c in cols])
    return np.stack(np.broadcast_arrays(*cols), axis=-1).astype(float)


def _zeros(u, v):
    return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)


class Chart:
    """Regular map from a parameter rectangle into space.

    ``jet1(u, v) -> (s_u, s_v)`` and ``jet2(u, v) -> (s_uu, s_uv, s_vv)`` are
    optional analytic partials (finite differences otherwise). All callables
    broadcast over array arguments, returning trailing axis 3.
    """

    def __init__(
        self,
        func: Callable,
        udomain: Sequence[float],
        vdomain: Sequence[float],
        jet1: Optional[Callable] = None,
        jet2: Optional[Callable] = None,
        uperiod: Optional[float] = None,
        vperiod: Optional[float] = None,
        inverse: Optional[Callable] = None,
        safe: Optional[Callable] = None,
        name: str = "chart",
        tol: Tolerances = DEFAULT_TOL,
        validate: bool = True,
    ):
        self.func = func
        self.udomain = (float(udomain[0]), float(udomain[1]))
        self.vdomain = (float(vdomain[0]), float(vdomain[1]))
        self._jet1, self._jet2 = jet1, jet2
        self.uperiod, self.vperiod = uperiod, vperiod
        self.inverse = inverse
        self._safe = safe
        self.name = name
        self.tol = tol
        if validate:
            self._validate()

    # -- evaluation ---------------------------------------------------------
    def wrap(self, u, v):
        if self.uperiod:
            u = self.udomain[0] + (u - self.udomain[0]) % self.uperiod
        if self.vperiod:
            v = self.vdomain[0] + (v - self.vdomain[0]) % self.vperiod
        return u, v

    def point(self, u, v) -> np.ndarray:
        return np.asarray(self.func(u, v), dtype=float)

    def partials(self, u, v):
        if self._jet1 is not None:
            su, sv = self._jet1(u, v)
            return np.asarray(su, dtype=float), np.asarray(sv, dtype=float)
        su = numeric.derivative(lambda x: self.func(x, v), u, 1, self.tol)
        sv = numeric.derivative(lambda y: self.func(u, y), v, 1, self.tol)
        return np.asarray(su), np.asarray(sv)

    def second(self, u, v):
        if self._jet2 is not None:
            return tuple(np.asarray(x, dtype=float) for x in self._jet2(u, v))
        if self._jet1 is not None:
            suu = numeric.derivative(lambda x: self._jet1(x, v)[0], u, 1, self.tol)
            suv = numeric.derivative(lambda y: self._jet1(u, y)[0], v, 1, self.tol)
            svv = numeric.derivative(lambda y: self._jet1(u, y)[1], v, 1, self.tol)
            return np.asarray(suu), np.asarray(suv), np.asarray(svv)
        suu = numeric.derivative(lambda x: self.func(x, v), u, 2, self.tol)
        svv = numeric.derivative(lambda y: self.func(u, y), v, 2, self.tol)
        # fourth-order mixed stencil: tensor product of the 1-D first-derivative rule
        offs, w = (-2, -1, 1, 2), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
        hu = numeric.fd_step_for(float(np.max(np.abs(u))), 2, self.tol)
        hv = numeric.fd_step_for(float(np.max(np.abs(v))), 2, self.tol)
        suv = sum(
            wi * wj * np.asarray(self.func(u + i * hu, v + j * hv), dtype=float)
            for i, wi in zip(offs, w)
            for j, wj in zip(offs, w)
        ) / (hu * hv)
        return np.asarray(suu), np.asarray(suv), np.asarray(svv)

    def normal(self, u, v) -> np.ndarray:
        su, sv = self.partials(u, v)
        n = np.cross(su, sv)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    # -- domain -------------------------------------------------------------
    def contains(self, u, v) -> bool:
        ok_u = self.uperiod is not None or self.udomain[0] <= u <= self.udomain[1]
        ok_v = self.vperiod is not None or self.vdomain[0] <= v <= self.vdomain[1]
        return bool(ok_u and ok_v)

    def safe(self, u, v) -> bool:
        """True away from the chart's seams (5% margin on non-periodic sides)."""
        if self._safe is not None:
            return bool(self._safe(u, v))
        for x, (lo, hi), per in ((u, self.udomain, self.uperiod), (v, self.vdomain, self.vperiod)):
            if per:
                continue
            m = SAFE_MARGIN * (hi - lo)
            if not lo + m <= x <= hi - m:
                return False
        return True

    def _validate(self, n: int = 17):
        us = np.linspace(*self.udomain, n)
        vs = np.linspace(*self.vdomain, n)
        U, V = np.meshgrid(us, vs, indexing="ij")
        su, sv = self.partials(U, V)
        su, sv = np.broadcast_to(su, U.shape + (3,)), np.broadcast_to(sv, U.shape + (3,))
        area = np.linalg.norm(np.cross(su, sv), axis=-1)
        scale = np.linalg.norm(su, axis=-1) * np.linalg.norm(sv, axis=-1)
        # seams such as poles of a lat-long chart are tolerated on the boundary only
        interior = area[1:-1, 1:-1] if n > 2 else area
        if np.any(interior <= REGULARITY_FLOOR * np.maximum(scale[1:-1, 1:-1], 1.0)):
            raise IrregularPoint(f"{self.name}: s_u and s_v become dependent inside the domain")

    def flipped(self) -> "Chart":
        """Same image with (u, v) swapped, which reverses the orientation."""
        j1 = None if self._jet1 is None else (lambda u, v: tuple(reversed(self._jet1(v, u))))
        j2 = None
        if self._jet2 is not None:
            def j2(u, v):
                a, b, c = self._jet2(v, u)
                return c, b, a
        inv = None
        if self.inverse is not None:
            def inv(p):
                a, b = self.inverse(p)
                return b, a
        safe = None if self._safe is None else (lambda u, v: self._safe(v, u))
        return Chart(
            lambda u, v: self.func(v, u), self.vdomain, self.udomain, j1, j2,
            self.vperiod, self.uperiod, inv, safe, self.name + "^flip", self.tol, validate=False,
        )

    def __repr__(self):
        return f"Chart({self.name!r}, u={self.udomain}, v={self.vdomain})"


@dataclass
class Surface:
    """A builtin or custom surface.

    ``charts`` form the atlas used for geodesic integration;
    ``global_chart`` covers the whole surface (possibly with degenerate seams)
    and is used for integrals and shortest-path meshes.
    """

    kind: str
    charts: list
    global_chart: Chart
    params: dict = field(default_factory=dict)
    axis: Optional[tuple] = None  # (point, unit direction) for surfaces of revolution
    sign_K: Optional[int] = None  # known sign of Gauss curvature, if constant

    def locate(self, p):
        """Chart index and coordinates of an ambient point on the surface."""
        p = np.asarray(p, dtype=float)
        best = None
        for i, ch in enumerate(self.charts):
            if ch.inverse is None:
                continue
            u, v = ch.inverse(p)
            if not (np.isfinite(u) and np.isfinite(v)) or not ch.contains(u, v):
                continue
            err = np.linalg.norm(ch.point(u, v) - p)
            if err > 1e-6 * max(1.0, np.linalg.norm(p)):
                raise InputError(f"point {p} is not on the surface (distance {err:.2e})")
            if ch.safe(u, v):
                return i, ch.wrap(u, v)
            if best is None:
                best = (i, ch.wrap(u, v))
        if best is not None:
            return best
        raise InputError(f"point {p} is not covered by any chart of {self.kind}")

    def point(self, i, u, v):
        return self.charts[i].point(u, v)


# ---------------------------------------------------------------------------
# builtin surfaces


def plane(extent: float = 1e4) -> Surface:
    zero = lambda u, v: _stack(_zeros(u, v), _zeros(u, v), _zeros(u, v))
    ch = Chart(
        lambda u, v: _stack(u, v, _zeros(u, v)),
        (-extent, extent),
        (-extent, extent),
        jet1=lambda u, v: (_stack(1 + _zeros(u, v), _zeros(u, v), _zeros(u, v)), _stack(_zeros(u, v), 1 + _zeros(u, v), _zeros(u, v))),
        jet2=lambda u, v: (zero(u, v), zero(u, v), zero(u, v)),
        inverse=lambda p: (float(p[0]), float(p[1])),
        name="plane",
    )
    return Surface("plane", [ch], ch, {"extent": extent}, sign_K=0)


def graph(f, domain=((-2.0, 2.0), (-2.0, 2.0)), derivs=None, name="graph", sign_K=None) -> Surface:
    """Graph z = f(x, y) over a rectangle.

    ``f`` is an :class:`Expr` in (x, y) or a callable; ``derivs`` optionally
    supplies ``(f_x, f_y, f_xx, f_xy, f_yy)``.
    """
    if isinstance(f, str):
        f = Expr.parse(f, ("x", "y"))
    if isinstance(f, Expr):
        fx, fy = f.diff("x"), f.diff("y")
        derivs = (fx, fy, fx.diff("x"), fx.diff("y"), fy.diff("y"))
    (u0, u1), (v0, v1) = domain
    jet1 = jet2 = None
    if derivs is not None:
        fx, fy, fxx, fxy, fyy = derivs

        def jet1(u, v):
            z = _zeros(u, v)
            return _stack(1 + z, z, fx(u, v) + z), _stack(z, 1 + z, fy(u, v) + z)

        def jet2(u, v):
            z = _zeros(u, v)
            return _stack(z, z, fxx(u, v) + z), _stack(z, z, fxy(u, v) + z), _stack(z, z, fyy(u, v) + z)

    ch = Chart(
        lambda u, v: _stack(u, v, f(u, v) + _zeros(u, v)),
        (u0, u1),
        (v0, v1),
        jet1,
        jet2,
        inverse=lambda p: (float(p[0]), float(p[1])),
        name=name,
    )
    return Surface("graph", [ch], ch, {"name": name}, sign_K=sign_K)


def saddle(extent: float = 3.0) -> Surface:
    """z = x^2 - y^2."""
    f = lambda x, y: x * x - y * y
    d = (lambda x, y: 2 * x, lambda x, y: -2 * y, lambda x, y: 2.0, lambda x, y: 0.0, lambda x, y: -2.0)
    s = graph(f, ((-extent, extent), (-extent, extent)), d, name="saddle", sign_K=-1)
    s.kind = "saddle"
    return s


def paraboloid(extent: float = 3.0, a: float = 0.5) -> Surface:
    """z = a (x^2 + y^2), a convex graph."""
    f = lambda x, y: a * (x * x + y * y)
    d = (lambda x, y: 2 * a * x, lambda x, y: 2 * a * y, lambda x, y: 2 * a, lambda x, y: 0.0, lambda x, y: 2 * a)
    s = graph(f, ((-extent, extent), (-extent, extent)), d, name="paraboloid", sign_K=1)
    s.kind = "paraboloid"
    return s


def smooth_cone(slope: float = 0.5, eps: float = 0.3, extent: float = 6.0) -> Surface:
    """Graph of slope * sqrt(x^2 + y^2 + eps^2): convex and slope-Lipschitz."""

    def f(x, y):
        return slope * np.sqrt(x * x + y * y + eps * eps)

    def fx(x, y):
        return slope * x / np.sqrt(x * x + y * y + eps * eps)

    def fy(x, y):
        return slope * y / np.sqrt(x * x + y * y + eps * eps)

    def fxx(x, y):
        r2 = x * x + y * y + eps * eps
        return slope * (y * y + eps * eps) / r2**1.5

    def fxy(x, y):
        r2 = x * x + y * y + eps * eps
        return -slope * x * y / r2**1.5

    def fyy(x, y):
        r2 = x * x + y * y + eps * eps
        return slope * (x * x + eps * eps) / r2**1.5

    s = graph(f, ((-extent, extent), (-extent, extent)), (fx, fy, fxx, fxy, fyy), name="smooth_cone", sign_K=1)
    s.kind = "smooth_cone"
    s.params.update(slope=slope, eps=eps)
    return s


def _sphere_charts(R: float):
    def north(u, v):
        r2 = u * u + v * v
        d = 1 + r2
        return R * _stack(2 * v / d, 2 * u / d, (1 - r2) / d)

    def south(u, v):
        r2 = u * u + v * v
        d = 1 + r2
        return R * _stack(2 * u / d, 2 * v / d, (r2 - 1) / d)

    def jets(u, v, swap, zsign):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        r2 = u * u + v * v
        d = 1 + r2
        # x = 2a/d, y = 2b/d, z = zsign*(1-r2)/d with (a, b) = (u, v) or (v, u)
        a_u, b_u = (0.0, 1.0) if swap else (1.0, 0.0)
        a_v, b_v = (1.0, 0.0) if swap else (0.0, 1.0)
        a, b = (v, u) if swap else (u, v)

        def comp(du_u, du_v):
            # first partial of (2a/d, 2b/d, zsign*(1-r2)/d) along direction with d(u,v)=(du_u,du_v)
            dr2 = 2 * (u * du_u + v * du_v)
            da = a_u * du_u + a_v * du_v
            db = b_u * du_u + b_v * du_v
            x = 2 * da / d - 2 * a * dr2 / d**2
            y = 2 * db / d - 2 * b * dr2 / d**2
            z = zsign * (-dr2 / d - (1 - r2) * dr2 / d**2)
            return R * _stack(x, y, z)

        return comp

    def second_partials(u, v, swap, zsign):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        r2 = u * u + v * v
        d = 1 + r2
        a, b = (v, u) if swap else (u, v)
        # partials of p = 2a/d etc. via explicit formulas
        out = []
        for (i, j) in ((0, 0), (0, 1), (1, 1)):
            xi = u if i == 0 else v
            xj = u if j == 0 else v
            delta = 1.0 if i == j else 0.0
            # d/dx_i d/dx_j (1/d) and (r2/d)
            inv_d_ij = -2 * delta / d**2 + 8 * xi * xj / d**3
            # 2a/d: a is a coordinate q; d_ij(q/d) = dq_i * d_j(1/d) + dq_j * d_i(1/d) + q d_ij(1/d)
            def q_term(q, qidx):
                dqi = 1.0 if qidx == i else 0.0
                dqj = 1.0 if qidx == j else 0.0
                di_inv = -2 * xi / d**2
                dj_inv = -2 * xj / d**2
                return 2 * (dqi * dj_inv + dqj * di_inv + q * inv_d_ij)

            aidx = 1 if swap else 0
            bidx = 0 if swap else 1
            x = q_term(a, aidx)
            y = q_term(b, bidx)
            # (1 - r2)/d = 2/d - 1
            z = zsign * 2 * inv_d_ij
            out.append(R * _stack(x, y, z))
        return tuple(out)

    def make(swap, zsign, f, inv, name):
        def jet1(u, v):
            c = jets(u, v, swap, zsign)
            return c(1.0, 0.0), c(0.0, 1.0)

        return Chart(
            f, (-2.0, 2.0), (-2.0, 2.0), jet1, lambda u, v: second_partials(u, v, swap, zsign),
            inverse=inv, safe=lambda u, v: u * u + v * v <= 1.5**2, name=name,
        )

    def inv_north(p):
        x, y, z = np.asarray(p, dtype=float) / R
        if 1 + z <= 1e-12:
            return math.inf, math.inf
        return float(y / (1 + z)), float(x / (1 + z))

    def inv_south(p):
        x, y, z = np.asarray(p, dtype=float) / R
        if 1 - z <= 1e-12:
            return math.inf, math.inf
        return float(x / (1 - z)), float(y / (1 - z))

    return [make(True, 1.0, north, inv_north, "sphere_north"), make(False, -1.0, south, inv_south, "sphere_south")]


def sphere(R: float = 1.0) -> Surface:
    """Round sphere of radius R with inward normal.

    The atlas holds two stereographic charts; the global chart is
    longitude/colatitude with seams at the poles.
    """

    def f(th, ph):
        return R * _stack(np.sin(ph) * np.cos(th), np.sin(ph) * np.sin(th), np.cos(ph))

    def jet1(th, ph):
        return (
            R * _stack(-np.sin(ph) * np.sin(th), np.sin(ph) * np.cos(th), _zeros(th, ph)),
            R * _stack(np.cos(ph) * np.cos(th), np.cos(ph) * np.sin(th), -np.sin(ph) + _zeros(th, ph)),
        )

    def jet2(th, ph):
        return (
            R * _stack(-np.sin(ph) * np.cos(th), -np.sin(ph) * np.sin(th), _zeros(th, ph)),
            R * _stack(-np.cos(ph) * np.sin(th), np.cos(ph) * np.cos(th), _zeros(th, ph)),
            R * _stack(-np.sin(ph) * np.cos(th), -np.sin(ph) * np.sin(th), -np.cos(ph) + _zeros(th, ph)),
        )

    def inv(p):
        x, y, z = np.asarray(p, dtype=float) / R
        return float(math.atan2(y, x) % (2 * math.pi)), float(math.acos(max(-1.0, min(1.0, z))))

    latlong = Chart(f, (0.0, 2 * math.pi), (0.0, math.pi), jet1, jet2, uperiod=2 * math.pi, inverse=inv, name="sphere_latlong")
    return Surface("sphere", _sphere_charts(R), latlong, {"R": R}, axis=(np.zeros(3), np.array([0.0, 0.0, 1.0])), sign_K=1)


def torus(R: float = 2.0, r: float = 1.0) -> Surface:
    """Torus of revolution about the z-axis; u is the tube angle, v the
    rotation angle, and the outer equator is u = 0."""
    if not R > r > 0:
        raise InputError("torus needs R > r > 0")

    def f(u, v):
        rho = R + r * np.cos(u)
        return _stack(rho * np.cos(v), rho * np.sin(v), r * np.sin(u) + _zeros(u, v))

    def jet1(u, v):
        rho = R + r * np.cos(u)
        return (
            _stack(-r * np.sin(u) * np.cos(v), -r * np.sin(u) * np.sin(v), r * np.cos(u) + _zeros(u, v)),
            _stack(-rho * np.sin(v), rho * np.cos(v), _zeros(u, v)),
        )

    def jet2(u, v):
        rho = R + r * np.cos(u)
        return (
            _stack(-r * np.cos(u) * np.cos(v), -r * np.cos(u) * np.sin(v), -r * np.sin(u) + _zeros(u, v)),
            _stack(r * np.sin(u) * np.sin(v), -r * np.sin(u) * np.cos(v), _zeros(u, v)),
            _stack(-rho * np.cos(v), -rho * np.sin(v), _zeros(u, v)),
        )

    def inv(p):
        x, y, z = np.asarray(p, dtype=float)
        return float(math.atan2(z, math.hypot(x, y) - R) % (2 * math.pi)), float(math.atan2(y, x) % (2 * math.pi))

    tp = 2 * math.pi
    ch = Chart(f, (0.0, tp), (0.0, tp), jet1, jet2, uperiod=tp, vperiod=tp, inverse=inv, name="torus")
    return Surface("torus", [ch], ch, {"R": R, "r": r}, axis=(np.zeros(3), np.array([0.0, 0.0, 1.0])))


def revolution(generatrix: ParamCurve, name: str = "revolution", sign_K=None) -> Surface:
    """Rotate the plane curve (x(u), y(u)) about the z-axis; x is the height,
    y > 0 the distance to the axis. v is the rotation angle."""
    if generatrix.dim != 2:
        raise InputError("generatrix must be a plane curve")
    if generatrix.closed:
        raise InputError("closed generatrices are not supported; use torus()")
    ts = np.linspace(*generatrix.domain, 257)
    if np.min(generatrix.points(ts)[:, 1]) <= 0:
        raise AxisContact("generatrix touches or crosses the axis")
    g = generatrix

    def f(u, v):
        xy = g.points(u) if np.ndim(u) else g.point(u)
        x, y = xy[..., 0], xy[..., 1]
        return _stack(y * np.cos(v), y * np.sin(v), x + 0 * np.asarray(v))

    def _d(u, order):
        if np.ndim(u):
            return np.array([g.deriv(t, order) for t in np.ravel(u)]).reshape(np.shape(u) + (2,))
        return g.deriv(u, order)

    def jet1(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        xy, d1 = _pts(u), _d(u, 1)
        y = xy[..., 1]
        return (
            _stack(d1[..., 1] * np.cos(v), d1[..., 1] * np.sin(v), d1[..., 0]),
            _stack(-y * np.sin(v), y * np.cos(v), np.zeros_like(y)),
        )

    def jet2(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        xy, d1, d2 = _pts(u), _d(u, 1), _d(u, 2)
        y = xy[..., 1]
        return (
            _stack(d2[..., 1] * np.cos(v), d2[..., 1] * np.sin(v), d2[..., 0]),
            _stack(-d1[..., 1] * np.sin(v), d1[..., 1] * np.cos(v), np.zeros_like(y)),
            _stack(-y * np.cos(v), -y * np.sin(v), np.zeros_like(y)),
        )

    def _pts(u):
        return g.points(u) if np.ndim(u) else g.point(float(u))

    dense_t = np.linspace(*g.domain, 2049)
    dense_p = g.points(dense_t)

    def inv(p):
        x, y, z = np.asarray(p, dtype=float)
        target = np.array([z, math.hypot(x, y)])
        i = int(np.argmin(np.sum((dense_p - target) ** 2, axis=1)))
        t = float(dense_t[i])
        for _ in range(20):
            r = g.point(t) - target
            d = g.deriv(t, 1)
            step = float(r @ d) / float(d @ d)
            t = min(max(t - step, g.domain[0]), g.domain[1])
            if abs(step) < 1e-14:
                break
        return t, float(math.atan2(y, x) % (2 * math.pi))

    tp = 2 * math.pi
    ch = Chart(f, g.domain, (0.0, tp), jet1, jet2, vperiod=tp, inverse=inv, name=name)
    return Surface(name, [ch], ch, {"generatrix": g.name}, axis=(np.zeros(3), np.array([0.0, 0.0, 1.0])), sign_K=sign_K)


def _line_generatrix(r, lo, hi):
    return ParamCurve(
        lambda s: _stack(np.asarray(s, dtype=float), r + 0 * np.asarray(s, dtype=float)),
        (lo, hi),
        d1=lambda s: np.array([1.0, 0.0]),
        d2=lambda s: np.array([0.0, 0.0]),
        name="line",
    )


def cylinder(r: float = 1.0, height=(-10.0, 10.0)) -> Surface:
    s = revolution(_line_generatrix(r, *height), name="cylinder", sign_K=0)
    s.params.update(r=r)
    return s


def catenoid(height=(-1.5, 1.5)) -> Surface:
    """cosh^2 z = x^2 + y^2."""
    gen = ParamCurve(
        lambda z: _stack(np.asarray(z, dtype=float), np.cosh(z)),
        height,
        d1=lambda z: np.array([1.0, math.sinh(z)]),
        d2=lambda z: np.array([0.0, math.cosh(z)]),
        name="catenary",
    )
    return revolution(gen, name="catenoid", sign_K=-1)


def tractrix(s_range=(0.5, 3.0)) -> ParamCurve:
    """Unit-speed generatrix with radius e^{-s}."""

    def x(s):
        return np.arccosh(np.exp(s)) - np.sqrt(1 - np.exp(-2 * np.asarray(s, dtype=float)))

    return ParamCurve(
        lambda s: _stack(x(s), np.exp(-np.asarray(s, dtype=float))),
        s_range,
        d1=lambda s: np.array([math.sqrt(1 - math.exp(-2 * s)), -math.exp(-s)]),
        d2=lambda s: np.array([math.exp(-2 * s) / math.sqrt(1 - math.exp(-2 * s)), math.exp(-s)]),
        name="tractrix",
    )


def pseudosphere(s_range=(0.5, 3.0)) -> Surface:
    s = revolution(tractrix(s_range), name="pseudosphere", sign_K=-1)
    s.params.update(s_range=tuple(s_range))
    return s


def chart_surface(xyz: Sequence[str], udomain, vdomain, uperiod=None, vperiod=None) -> Surface:
    """Surface from three expressions in (u, v)."""
    exprs = [Expr.parse(e, ("u", "v")) if isinstance(e, str) else e for e in xyz]
    du = [e.diff("u") for e in exprs]
    dv = [e.diff("v") for e in exprs]
    duu = [e.diff("u") for e in du]
    duv = [e.diff("v") for e in du]
    dvv = [e.diff("v") for e in dv]

    def ev(es):
        return lambda u, v: _stack(*[e(u, v) + _zeros(u, v) for e in es])

    ch = Chart(
        ev(exprs), udomain, vdomain,
        lambda u, v: (ev(du)(u, v), ev(dv)(u, v)),
        lambda u, v: (ev(duu)(u, v), ev(duv)(u, v), ev(dvv)(u, v)),
        uperiod=uperiod, vperiod=vperiod, name="chart_expr",
    )
    ch.inverse = numeric_inverse(ch)
    return Surface("chart_expr", [ch], ch)


def numeric_inverse(ch: Chart, n: int = 96):
    """Chart inverse by nearest node of an n x n scan followed by
    Gauss-Newton on |s(u, v) - p|^2, clamped to the parameter box."""
    us = np.linspace(*ch.udomain, n)
    vs = np.linspace(*ch.vdomain, n)
    U, V = np.meshgrid(us, vs, indexing="ij")
    P = ch.point(U, V).reshape(-1, 3)

    def inv(p):
        p = np.asarray(p, dtype=float)
        k = int(np.argmin(np.sum((P - p) ** 2, axis=1)))
        x = np.array([U.ravel()[k], V.ravel()[k]])
        for _ in range(30):
            su, sv = ch.partials(*x)
            J = np.column_stack([su, sv])
            step, *_ = np.linalg.lstsq(J, p - ch.point(*x), rcond=None)
            x = x + step
            x[0] = min(max(x[0], ch.udomain[0]), ch.udomain[1])
            x[1] = min(max(x[1], ch.vdomain[0]), ch.vdomain[1])
            if np.linalg.norm(step) < 1e-14:
                break
        return float(x[0]), float(x[1])

    return inv


# ---------------------------------------------------------------------------
# first- and second-order data


def frame(ch: Chart, u: float, v: float):
    """Tangent partials and unit normal at (u, v)."""
    su, sv = ch.partials(u, v)
    n = np.cross(su, sv)
    nn = float(np.linalg.norm(n))
    if nn <= REGULARITY_FLOOR * max(1.0, float(np.linalg.norm(su) * np.linalg.norm(sv))):
        raise IrregularPoint(f"chart {ch.name} is not regular at ({u}, {v})")
    return su, sv, n / nn


@dataclass(frozen=True)
class ShapeOperator:
    matrix: np.ndarray  # in the orthonormal basis (e1, e2)
    e1: np.ndarray
    e2: np.ndarray
    normal: np.ndarray
    coord_matrix: np.ndarray  # acting on (du, dv) coordinates


def second_fundamental(ch: Chart, u: float, v: float):
    """Gram matrix, normal pairings of second partials, partials and normal."""
    su, sv, N = frame(ch, u, v)
    suu, suv, svv = ch.second(u, v)
    G = np.array([[su @ su, su @ sv], [su @ sv, sv @ sv]])
    B = np.array([[suu @ N, suv @ N], [suv @ N, svv @ N]])
    return G, B, su, sv, N


def shape_operator(ch: Chart, u: float, v: float) -> ShapeOperator:
    """Shape operator at (u, v) as a 2x2 matrix in an orthonormal tangent basis.

    The coordinate form G^{-1} B is conjugated into the basis
    ``e1 = s_u/|s_u|``, ``e2 = N x e1``.
    """
    G, B, su, sv, N = second_fundamental(ch, u, v)
    S_coord = np.linalg.solve(G, B)
    e1 = su / np.linalg.norm(su)
    e2 = np.cross(N, e1)
    M = np.array([[su @ e1, sv @ e1], [su @ e2, sv @ e2]])
    S = M @ S_coord @ np.linalg.inv(M)
    return ShapeOperator(S, e1, e2, N, S_coord)


@dataclass(frozen=True)
class CurvatureData:
    k1: float
    k2: float
    e1: np.ndarray
    e2: np.ndarray
    K: float
    H: float
    normal: np.ndarray
    umbilic: bool = False


def curvatures(ch: Chart, u: float, v: float) -> CurvatureData:
    """Principal curvatures (k1 <= k2), directions, Gauss K = k1 k2 and
    H = k1 + k2. At umbilics the directions are an arbitrary orthonormal pair."""
    so = shape_operator(ch, u, v)
    S = 0.5 * (so.matrix + so.matrix.T)
    (k1, k2), (a, b) = numeric.eig_sym2(S)
    d1 = a[0] * so.e1 + a[1] * so.e2
    d2 = b[0] * so.e1 + b[1] * so.e2
    umb = abs(k2 - k1) <= UMBILIC_TOL * max(1.0, abs(k1), abs(k2))
    return CurvatureData(k1, k2, d1, d2, k1 * k2, k1 + k2, so.normal, umb)


def gauss_curvature(ch: Chart, u, v):
    """K = det B / det G; broadcasts over arrays of (u, v)."""
    su, sv = ch.partials(u, v)
    suu, suv, svv = ch.second(u, v)
    n = np.cross(su, sv)
    nn = np.linalg.norm(n, axis=-1)
    N = n / nn[..., None]
    L = np.sum(suu * N, axis=-1)
    M = np.sum(suv * N, axis=-1)
    Nn = np.sum(svv * N, axis=-1)
    return (L * Nn - M * M) / (nn * nn)


def mean_curvature(ch: Chart, u: float, v: float) -> float:
    return curvatures(ch, u, v).H


def normal_curvature(ch: Chart, u: float, v: float, w) -> float:
    """Normal curvature <Shape(w), w> for a unit tangent vector w."""
    so = shape_operator(ch, u, v)
    w = np.asarray(w, dtype=float)
    nw = float(np.linalg.norm(w))
    if abs(float(w @ so.normal)) > 1e-8 * max(nw, 1.0) or abs(nw - 1.0) > 1e-8:
        raise NotTangent("direction must be a unit tangent vector")
    c = np.array([w @ so.e1, w @ so.e2])
    return float(c @ so.matrix @ c)


def area_element(ch: Chart, u, v):
    su, sv = ch.partials(u, v)
    return np.linalg.norm(np.cross(su, sv), axis=-1)


# ---------------------------------------------------------------------------
# integration


def _axis_rule(lo, hi, period, n):
    if period and abs((hi - lo) - period) <= 1e-12 * period:
        return numeric.periodic_nodes(lo, hi, n)
    return numeric.composite_gauss(lo, hi, max(1, n // 8), 8)


def chart_integral(ch: Chart, region, g: Callable, tol: Tolerances = DEFAULT_TOL, n0: int = 32, max_level: int = 7) -> float:
    """Integrate ``g(U, V) * |s_u x s_v|`` over a parameter rectangle.

    Node counts double until two successive estimates agree.
    """
    u0, u1, v0, v1 = region
    if u0 > u1 or v0 > v1:
        raise InputError("region bounds must be ordered")
    if u0 == u1 or v0 == v1:
        return 0.0
    prev = None
    n = n0
    target = max(tol.quad_abs_tol, 1e-11)
    for _ in range(max_level):
        uu, wu = _axis_rule(u0, u1, ch.uperiod, n)
        vv, wv = _axis_rule(v0, v1, ch.vperiod, n)
        U, V = np.meshgrid(uu, vv, indexing="ij")
        vals = np.asarray(g(U, V), dtype=float) * area_element(ch, U, V)
        est = float(wu @ vals @ wv)
        if prev is not None and abs(est - prev) <= max(target, tol.quad_rel_tol * 10 * abs(est)):
            return est
        prev, n = est, 2 * n
    raise ToleranceNotMet(f"surface integral did not converge (last change {abs(est - prev):.2e})")


def surface_integral(ch: Chart, region, h: Callable, tol: Tolerances = DEFAULT_TOL) -> float:
    """Integral over ``s(region)`` of ``h(point)`` against surface area."""
    return chart_integral(ch, region, lambda U, V: h(ch.point(U, V)), tol)


def full_region(ch: Chart):
    return (*ch.udomain, *ch.vdomain)


def area(surface: Surface, tol: Tolerances = DEFAULT_TOL) -> float:
    ch = surface.global_chart
    return chart_integral(ch, full_region(ch), lambda U, V: np.ones_like(U), tol)


def integral_gauss(surface: Surface, tol: Tolerances = DEFAULT_TOL) -> float:
    """Integral of Gauss curvature over the whole surface."""
    ch = surface.global_chart

    def K(U, V):
        vals = gauss_curvature(ch, U, V)
        # degenerate seams (poles) carry zero area; their curvature value is irrelevant
        return np.where(np.isfinite(vals), vals, 0.0)

    with np.errstate(invalid="ignore", divide="ignore"):
        return chart_integral(ch, full_region(ch), K, tol)


def revolution_curvatures(generatrix: ParamCurve, s: float):
    """Closed-form principal curvatures (parallel, meridian) of the surface
    swept by a unit-speed generatrix (x(s), y(s))."""
    x, y = generatrix.point(s)
    d1 = generatrix.deriv(s, 1)
    d2 = generatrix.deriv(s, 2)
    if y <= 0:
        raise AxisContact("generatrix touches the axis")
    ax = abs(float(d1[0]))
    if ax <= REGULARITY_FLOOR:
        raise IrregularPoint("horizontal generatrix tangent; formula undefined")
    return ax / y, -float(d2[1]) / ax
