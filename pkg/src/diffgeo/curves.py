"""Parametrized plane and space curves and their pointwise invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import numeric
from .errors import (
    DomainViolation,
    InputError,
    NotClosed,
    NotPlanar,
    NotRegular,
    VanishingCurvature,
)
from .numeric import DEFAULT_TOL, Tolerances

KAPPA_FLOOR = 1e-8
REGULARITY_FLOOR = 1e-10
VALIDATION_SAMPLES = 2048
VERTEX_SCAN = 4096


class ParamCurve:
    """A smooth map from ``[a, b]`` into the plane or space.

    ``func`` maps a parameter (scalar or array) to points; array input of
    shape ``(n,)`` should give shape ``(n, dim)``. Optional ``d1``, ``d2``,
    ``d3`` are analytic derivatives and take precedence over finite
    differences. Closed curves wrap parameters modulo ``b - a``.
    """

    def __init__(
        self,
        func: Callable,
        domain: Sequence[float],
        closed: bool = False,
        d1: Optional[Callable] = None,
        d2: Optional[Callable] = None,
        d3: Optional[Callable] = None,
        name: str = "curve",
        tol: Tolerances = DEFAULT_TOL,
        validate: bool = True,
    ):
        a, b = float(domain[0]), float(domain[1])
        if not b > a:
            raise InputError("curve domain must be a nonempty interval")
        self.func = func
        self.domain = (a, b)
        self.closed = bool(closed)
        self._d = {1: d1, 2: d2, 3: d3}
        self.name = name
        self.tol = tol
        p0 = np.asarray(func(a), dtype=float)
        if p0.shape not in ((2,), (3,)):
            raise InputError("curves must take values in 2- or 3-space")
        self.dim = p0.shape[0]
        if validate:
            self._validate()

    # -- evaluation --------------------------------------------------------
    @property
    def period(self) -> float:
        return self.domain[1] - self.domain[0]

    def wrap(self, t: float) -> float:
        if not self.closed:
            return t
        a = self.domain[0]
        return a + (t - a) % self.period

    def point(self, t: float) -> np.ndarray:
        return np.asarray(self.func(self.wrap(t)), dtype=float)

    def points(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.closed:
            a = self.domain[0]
            ts = a + (ts - a) % self.period
        try:
            out = np.asarray(self.func(ts), dtype=float)
            if out.shape == ts.shape + (self.dim,):
                return out
        except Exception:
            pass
        return np.array([self.func(t) for t in ts], dtype=float).reshape(ts.shape + (self.dim,))

    def deriv(self, t: float, order: int = 1) -> np.ndarray:
        t = self.wrap(t)
        analytic = self._d.get(order)
        if analytic is not None:
            return np.asarray(analytic(t), dtype=float)
        lower = self._d.get(order - 1) if order > 1 else None
        if lower is not None:
            return np.asarray(numeric.derivative(lower, t, 1, self.tol), dtype=float)
        return np.asarray(numeric.derivative(self.point, t, order, self.tol), dtype=float)

    def speed(self, t: float) -> float:
        return float(np.linalg.norm(self.deriv(t, 1)))

    def sample_params(self, n: int) -> np.ndarray:
        a, b = self.domain
        if self.closed:
            return a + self.period * np.arange(n) / n
        return np.linspace(a, b, n)

    # -- construction helpers ---------------------------------------------
    def _validate(self):
        ts = self.sample_params(VALIDATION_SAMPLES)
        pts = self.points(ts)
        scale = max(1.0, float(np.max(np.ptp(pts, axis=0))))
        floor = REGULARITY_FLOOR * scale
        if self._d[1] is not None:
            speeds = np.array([np.linalg.norm(self._d[1](t)) for t in ts[:: max(1, len(ts) // 256)]])
        else:
            # finite speed estimate from chords is enough for the regularity screen
            dense = self.points(np.linspace(self.domain[0], self.domain[1], VALIDATION_SAMPLES + 1))
            speeds = np.linalg.norm(np.diff(dense, axis=0), axis=1) * VALIDATION_SAMPLES / self.period
        if np.any(speeds <= floor):
            raise NotRegular(f"{self.name}: velocity vanishes on the validation sample")
        if self.closed:
            gap = np.linalg.norm(np.asarray(self.func(self.domain[1])) - pts[0])
            if gap > 1e-8 * scale:
                raise NotClosed(f"{self.name}: endpoints differ by {gap:.3e}")

    def with_domain(self, domain, closed=None) -> "ParamCurve":
        return ParamCurve(
            self.func,
            domain,
            self.closed if closed is None else closed,
            self._d[1],
            self._d[2],
            self._d[3],
            self.name,
            self.tol,
            validate=False,
        )

    def scaled(self, lam: float) -> "ParamCurve":
        d = {k: (None if f is None else (lambda t, f=f: lam * np.asarray(f(t)))) for k, f in self._d.items()}
        return ParamCurve(
            lambda t: lam * np.asarray(self.func(t)),
            self.domain,
            self.closed,
            d[1],
            d[2],
            d[3],
            f"{lam}*{self.name}",
            self.tol,
            validate=False,
        )

    def embedded(self) -> "ParamCurve":
        """The plane curve viewed inside 3-space (z = 0)."""
        if self.dim == 3:
            return self

        def lift(f):
            if f is None:
                return None

            def g(t):
                v = np.asarray(f(t), dtype=float)
                return np.concatenate([v, np.zeros(v.shape[:-1] + (1,))], axis=-1)

            return g

        return ParamCurve(
            lift(self.func), self.domain, self.closed, lift(self._d[1]), lift(self._d[2]),
            lift(self._d[3]), self.name, self.tol, validate=False,
        )

    def __repr__(self):
        return f"ParamCurve({self.name!r}, dim={self.dim}, domain={self.domain}, closed={self.closed})"


# ---------------------------------------------------------------------------
# builtin curves


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1).astype(float)


def helix(a: float = 1.0, b: float = 1.0, domain=(0.0, 2 * math.pi)) -> ParamCurve:
    return ParamCurve(
        lambda t: _stack(a * np.cos(t), a * np.sin(t), b * np.asarray(t, dtype=float)),
        domain,
        d1=lambda t: _stack(-a * np.sin(t), a * np.cos(t), b + 0 * np.asarray(t, dtype=float)),
        d2=lambda t: _stack(-a * np.cos(t), -a * np.sin(t), 0 * np.asarray(t, dtype=float)),
        d3=lambda t: _stack(a * np.sin(t), -a * np.cos(t), 0 * np.asarray(t, dtype=float)),
        name=f"helix({a},{b})",
    )


def circle(r: float = 1.0, center=(0.0, 0.0), clockwise: bool = False) -> ParamCurve:
    cx, cy = center
    s = -1.0 if clockwise else 1.0
    return ParamCurve(
        lambda t: _stack(cx + r * np.cos(t), cy + s * r * np.sin(t)),
        (0.0, 2 * math.pi),
        closed=True,
        d1=lambda t: _stack(-r * np.sin(t), s * r * np.cos(t)),
        d2=lambda t: _stack(-r * np.cos(t), -s * r * np.sin(t)),
        d3=lambda t: _stack(r * np.sin(t), -s * r * np.cos(t)),
        name=f"circle({r})",
    )


def ellipse(a: float = 2.0, b: float = 1.0, center=(0.0, 0.0)) -> ParamCurve:
    cx, cy = center
    return ParamCurve(
        lambda t: _stack(cx + a * np.cos(t), cy + b * np.sin(t)),
        (0.0, 2 * math.pi),
        closed=True,
        d1=lambda t: _stack(-a * np.sin(t), b * np.cos(t)),
        d2=lambda t: _stack(-a * np.cos(t), -b * np.sin(t)),
        d3=lambda t: _stack(a * np.sin(t), -b * np.cos(t)),
        name=f"ellipse({a},{b})",
    )


def segment(p, q) -> ParamCurve:
    """Straight segment from p to q parametrized on [0, 1]."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    d = q - p
    return ParamCurve(
        lambda t: p + np.multiply.outer(np.asarray(t, dtype=float), d),
        (0.0, 1.0),
        d1=lambda t: d.copy(),
        d2=lambda t: np.zeros_like(d),
        d3=lambda t: np.zeros_like(d),
        name="segment",
    )


def graph2d(f, domain, df=None, d2f=None, d3f=None) -> ParamCurve:
    """The graph y = f(x), traversed left to right.

    ``f`` may be an :class:`~diffgeo.expr.Expr` in ``x`` (derivatives are
    then symbolic) or any callable.
    """
    from .expr import Expr

    if isinstance(f, Expr):
        df, d2f, d3f = f.diff("x"), f.diff("x").diff("x"), f.diff("x").diff("x").diff("x")

    def lift(g, first):
        if g is None:
            return None
        return lambda x: _stack(first + 0 * np.asarray(x, dtype=float), g(x))

    return ParamCurve(
        lambda x: _stack(x, f(x)),
        domain,
        d1=lift(df, 1.0),
        d2=lift(d2f, 0.0),
        d3=lift(d3f, 0.0),
        name="graph2d",
    )


def trig_poly(cos_coeffs, sin_coeffs, offset=None) -> ParamCurve:
    """Closed curve whose k-th coordinate is
    ``offset[k] + sum_j cos_coeffs[k][j-1] cos(j t) + sin_coeffs[k][j-1] sin(j t)``.
    """
    C = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
    S = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
    if C.shape[0] not in (2, 3) or S.shape[0] != C.shape[0]:
        raise InputError("trig_poly needs one coefficient row per coordinate (2 or 3)")
    n = max(C.shape[1], S.shape[1])
    C = np.pad(C, ((0, 0), (0, n - C.shape[1])))
    S = np.pad(S, ((0, 0), (0, n - S.shape[1])))
    off = np.zeros(C.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    j = np.arange(1, n + 1, dtype=float)

    def make(order):
        # d^k/dt^k of cos(jt), sin(jt) cycles through (cos, -sin, -cos, sin)
        def g(t):
            t = np.asarray(t, dtype=float)
            jt = np.multiply.outer(t, j)
            c, s = np.cos(jt), np.sin(jt)
            jk = j**order
            phase = order % 4
            if phase == 0:
                dc, ds = c, s
            elif phase == 1:
                dc, ds = -s, c
            elif phase == 2:
                dc, ds = -c, -s
            else:
                dc, ds = s, -c
            out = (dc * jk) @ C.T + (ds * jk) @ S.T
            return out + off if order == 0 else out

        return g

    return ParamCurve(make(0), (0.0, 2 * math.pi), closed=True, d1=make(1), d2=make(2), d3=make(3), name="trig_poly")


def from_samples(rows, closed: bool = False, smoothing: Optional[float] = None) -> ParamCurve:
    """Cubic-spline curve through rows ``(t, x, y[, z])``.

    Args:
        rows: sample table, parameters strictly increasing.
        closed: join the last sample to the first with a periodic spline.
        smoothing: penalty weight of a cubic smoothing spline (per
            coordinate) for noisy open samples. ``None`` interpolates.
    """
    from scipy.interpolate import CubicSpline, make_smoothing_spline

    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] not in (3, 4) or rows.shape[0] < 4:
        raise InputError("samples need at least 4 rows of t,x,y[,z]")
    t, pts = rows[:, 0], rows[:, 1:]
    if np.any(np.diff(t) <= 0):
        raise InputError("sample parameters must be strictly increasing")
    if closed:
        if np.linalg.norm(pts[-1] - pts[0]) > 1e-9 * max(1.0, np.ptp(pts)):
            pts = np.vstack([pts, pts[:1]])
            t = np.append(t, t[-1] + (t[-1] - t[-2]))
        else:
            pts = pts.copy()
            pts[-1] = pts[0]
    if smoothing is not None:
        if closed:
            raise InputError("smoothing is only available for open sample curves")
        if smoothing < 0:
            raise InputError("smoothing must be non-negative")
        parts = [make_smoothing_spline(t, pts[:, k], lam=smoothing) for k in range(pts.shape[1])]
        lift = lambda order: lambda s: np.stack([p.derivative(order)(s) if order else p(s) for p in parts], axis=-1)
        return ParamCurve(lift(0), (t[0], t[-1]), d1=lift(1), d2=lift(2), d3=lift(3), name="samples")
    spline = CubicSpline(t, pts, bc_type="periodic" if closed else "not-a-knot")
    return ParamCurve(
        spline,
        (t[0], t[-1]),
        closed=closed,
        d1=spline.derivative(1),
        d2=spline.derivative(2),
        d3=spline.derivative(3),
        name="samples",
    )


def trefoil() -> ParamCurve:
    def f(t):
        t = np.asarray(t, dtype=float)
        return _stack((2 + np.cos(3 * t)) * np.cos(2 * t), (2 + np.cos(3 * t)) * np.sin(2 * t), np.sin(3 * t))

    def f1(t):
        t = np.asarray(t, dtype=float)
        r, dr = 2 + np.cos(3 * t), -3 * np.sin(3 * t)
        return _stack(dr * np.cos(2 * t) - 2 * r * np.sin(2 * t), dr * np.sin(2 * t) + 2 * r * np.cos(2 * t), 3 * np.cos(3 * t))

    def f2(t):
        t = np.asarray(t, dtype=float)
        r, dr, ddr = 2 + np.cos(3 * t), -3 * np.sin(3 * t), -9 * np.cos(3 * t)
        c, s = np.cos(2 * t), np.sin(2 * t)
        return _stack(ddr * c - 4 * dr * s - 4 * r * c, ddr * s + 4 * dr * c - 4 * r * s, -9 * np.sin(3 * t))

    return ParamCurve(f, (0.0, 2 * math.pi), closed=True, d1=f1, d2=f2, name="trefoil")


def figure_eight() -> ParamCurve:
    return ParamCurve(
        lambda t: _stack(np.sin(2 * np.asarray(t, dtype=float)), np.sin(t)),
        (0.0, 2 * math.pi),
        closed=True,
        d1=lambda t: _stack(2 * np.cos(2 * np.asarray(t, dtype=float)), np.cos(t)),
        d2=lambda t: _stack(-4 * np.sin(2 * np.asarray(t, dtype=float)), -np.sin(t)),
        d3=lambda t: _stack(-8 * np.cos(2 * np.asarray(t, dtype=float)), -np.cos(t)),
        name="figure_eight",
    )


def trochoid(a: float) -> ParamCurve:
    """The curve t + a e^{-it} (as a plane curve) over one period."""
    return ParamCurve(
        lambda t: _stack(np.asarray(t, dtype=float) + a * np.sin(t), a * np.cos(t)),
        (0.0, 2 * math.pi),
        d1=lambda t: _stack(1 + a * np.cos(t), -a * np.sin(t)),
        d2=lambda t: _stack(-a * np.sin(t), -a * np.cos(t)),
        d3=lambda t: _stack(-a * np.cos(t), a * np.sin(t)),
        name=f"trochoid({a})",
    )


def limacon(a: float = 1.0, b: float = 0.8) -> ParamCurve:
    """Polar curve r = a + b cos t; for b/a in (1/2, 1) it is simple but not convex."""
    def f(t):
        t = np.asarray(t, dtype=float)
        r = a + b * np.cos(t)
        return _stack(r * np.cos(t), r * np.sin(t))

    return ParamCurve(f, (0.0, 2 * math.pi), closed=True, name=f"limacon({a},{b})")


def from_callable(func, domain, closed=False, name="custom") -> ParamCurve:
    return ParamCurve(func, domain, closed=closed, name=name)


# ---------------------------------------------------------------------------
# pointwise invariants


@dataclass(frozen=True)
class FrenetData:
    T: np.ndarray
    N: Optional[np.ndarray]
    B: Optional[np.ndarray]
    kappa: float
    tau: Optional[float] = None
    skappa: Optional[float] = None


@dataclass(frozen=True)
class Circle2D:
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class Line2D:
    point: np.ndarray
    direction: np.ndarray


def _check_domain(c: ParamCurve, *ts):
    if c.closed:
        return
    a, b = c.domain
    slack = 1e-12 * max(1.0, abs(a), abs(b))
    for t in ts:
        if t < a - slack or t > b + slack:
            raise DomainViolation(f"parameter {t} outside {c.domain}")


def curve_length(c: ParamCurve, t0: Optional[float] = None, t1: Optional[float] = None, tol: Tolerances = DEFAULT_TOL) -> float:
    """Length of ``c`` between two parameters (the whole domain by default)."""
    t0 = c.domain[0] if t0 is None else t0
    t1 = c.domain[1] if t1 is None else t1
    _check_domain(c, t0, t1)
    if t1 < t0:
        raise DomainViolation("t0 must not exceed t1")
    return numeric.integrate(lambda t: c.speed(t), t0, t1, tol)


def polyline_length(points) -> float:
    pts = np.asarray(points, dtype=float)
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


class _ArcLengthMap:
    """Cumulative length table with Newton inversion."""

    def __init__(self, c: ParamCurve, panels: int = 256):
        self.c = c
        a, b = c.domain
        self.edges = np.linspace(a, b, panels + 1)
        self.gx, self.gw = np.polynomial.legendre.leggauss(10)
        cum = [0.0]
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            cum.append(cum[-1] + self._piece(lo, hi))
        self.cum = np.array(cum)
        self.length = float(self.cum[-1])

    def _piece(self, lo, hi):
        half = 0.5 * (hi - lo)
        xs = lo + half * (self.gx + 1)
        return half * sum(w * self.c.speed(x) for x, w in zip(xs, self.gw))

    def s_of_t(self, t):
        i = min(max(int(np.searchsorted(self.edges, t)) - 1, 0), len(self.edges) - 2)
        return self.cum[i] + (self._piece(self.edges[i], t) if t != self.edges[i] else 0.0)

    def t_of_s(self, s):
        s = min(max(s, 0.0), self.length)
        i = min(max(int(np.searchsorted(self.cum, s)) - 1, 0), len(self.edges) - 2)
        lo, hi = self.edges[i], self.edges[i + 1]
        # linear guess inside the panel, then Newton on s(t) - s
        frac = (s - self.cum[i]) / max(self.cum[i + 1] - self.cum[i], 1e-300)
        t = lo + frac * (hi - lo)
        for _ in range(30):
            r = self.s_of_t(t) - s
            step = r / self.c.speed(t)
            t = min(max(t - step, lo), hi)
            if abs(step) < 1e-15 * max(1.0, abs(t)):
                break
        return t


def to_arclength(c: ParamCurve) -> ParamCurve:
    """Reparametrize ``c`` by arc length; the new domain is ``[0, length]``."""
    ts = c.sample_params(257)
    floor = REGULARITY_FLOOR * max(1.0, float(np.max(np.ptp(c.points(ts), axis=0))))
    if min(c.speed(t) for t in ts) <= floor:
        raise NotRegular(f"{c.name}: not regular, cannot reparametrize by arc length")
    table = _ArcLengthMap(c)

    def f(s):
        if np.ndim(s):
            return np.array([c.point(table.t_of_s(x)) for x in np.ravel(s)]).reshape(np.shape(s) + (c.dim,))
        return c.point(table.t_of_s(s))

    def f1(s):
        v = c.deriv(table.t_of_s(s), 1)
        return v / np.linalg.norm(v)

    def f2(s):
        t = table.t_of_s(s)
        v, a = c.deriv(t, 1), c.deriv(t, 2)
        sp = np.linalg.norm(v)
        T = v / sp
        return (a - (a @ T) * T) / sp**2

    return ParamCurve(f, (0.0, table.length), closed=c.closed, d1=f1, d2=f2, name=f"arclength({c.name})", validate=False)


def frenet(c: ParamCurve, t: float) -> FrenetData:
    """Frenet data at ``t``. In the plane ``N`` is the counterclockwise
    rotation of ``T`` and ``skappa`` is set; in space torsion is set.

    Raises :class:`VanishingCurvature` (carrying ``kappa``) for a space curve
    whose curvature is below ``KAPPA_FLOOR``.
    """
    _check_domain(c, t)
    d1 = c.deriv(t, 1)
    sp = float(np.linalg.norm(d1))
    if sp <= REGULARITY_FLOOR:
        raise NotRegular(f"velocity vanishes at t={t}")
    T = d1 / sp
    d2 = c.deriv(t, 2)
    if c.dim == 2:
        sk = float(d1[0] * d2[1] - d1[1] * d2[0]) / sp**3
        N = np.array([-T[1], T[0]])
        return FrenetData(T=T, N=N, B=None, kappa=abs(sk), tau=None, skappa=sk)
    cross = np.cross(d1, d2)
    cn = float(np.linalg.norm(cross))
    kappa = cn / sp**3
    if kappa <= KAPPA_FLOOR:
        raise VanishingCurvature(f"curvature {kappa:.3e} below floor at t={t}", kappa=kappa)
    B = cross / cn
    N = np.cross(B, T)
    d3 = c.deriv(t, 3)
    tau = float(cross @ d3) / cn**2
    return FrenetData(T=T, N=N, B=B, kappa=kappa, tau=tau, skappa=None)


def curvature(c: ParamCurve, t: float) -> float:
    """Unsigned curvature; unlike :func:`frenet` it never raises on straight pieces."""
    d1, d2 = c.deriv(t, 1), c.deriv(t, 2)
    sp = float(np.linalg.norm(d1))
    if sp <= REGULARITY_FLOOR:
        raise NotRegular(f"velocity vanishes at t={t}")
    if c.dim == 2:
        return abs(float(d1[0] * d2[1] - d1[1] * d2[0])) / sp**3
    return float(np.linalg.norm(np.cross(d1, d2))) / sp**3


def signed_curvature(c: ParamCurve, t: float) -> float:
    """Signed curvature of a plane curve, positive where it turns left."""
    if c.dim != 2:
        raise NotPlanar("signed curvature is defined for plane curves")
    d1, d2 = c.deriv(t, 1), c.deriv(t, 2)
    sp = float(np.linalg.norm(d1))
    if sp <= REGULARITY_FLOOR:
        raise NotRegular(f"velocity vanishes at t={t}")
    return float(d1[0] * d2[1] - d1[1] * d2[0]) / sp**3


def osculating_circle(c: ParamCurve, t: float, flat_tol: float = KAPPA_FLOOR):
    """Osculating circle at ``t``, or the tangent line where curvature vanishes."""
    fd = frenet(c, t) if c.dim == 2 else None
    if fd is None:
        raise NotPlanar("osculating circles are computed for plane curves")
    p = c.point(t)
    if abs(fd.skappa) <= flat_tol:
        return Line2D(point=p, direction=fd.T)
    return Circle2D(center=p + fd.N / fd.skappa, radius=1.0 / abs(fd.skappa))


def evolute(c: ParamCurve) -> ParamCurve:
    """Curve of centers of curvature."""
    if c.dim != 2:
        raise NotPlanar("the evolute is defined for plane curves")
    ts = c.sample_params(VALIDATION_SAMPLES)
    ks = np.array([signed_curvature(c, t) for t in ts[::8]])
    # a sign change means a zero between samples even when none is sampled
    if np.min(np.abs(ks)) <= KAPPA_FLOOR or np.any(np.sign(ks) != np.sign(ks[0])):
        raise VanishingCurvature("signed curvature vanishes; evolute undefined")

    def omega(t):
        if np.ndim(t):
            return np.array([omega(x) for x in np.ravel(t)]).reshape(np.shape(t) + (2,))
        fd = frenet(c, t)
        return c.point(t) + fd.N / fd.skappa

    return ParamCurve(omega, c.domain, closed=c.closed, name=f"evolute({c.name})", validate=False)


@dataclass(frozen=True)
class VertexReport:
    params: list
    count: int
    degenerate: bool


def _golden(f, lo, hi, maximize, tol=1e-11):
    g = (math.sqrt(5) - 1) / 2
    sgn = -1.0 if maximize else 1.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = sgn * f(x1), sgn * f(x2)
    while hi - lo > tol * max(1.0, abs(lo)):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = sgn * f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = sgn * f(x2)
    return 0.5 * (lo + hi)


def vertices(c: ParamCurve, scan: int = VERTEX_SCAN) -> VertexReport:
    """Critical points of the signed curvature of a closed plane curve."""
    if c.dim != 2:
        raise NotPlanar("vertices are defined for plane curves")
    if not c.closed:
        raise NotClosed("vertices are counted on closed curves")
    ts = c.sample_params(scan)
    k = np.array([signed_curvature(c, t) for t in ts])
    spread = float(np.ptp(k))
    if spread <= 1e-9 * max(1.0, float(np.max(np.abs(k)))):
        return VertexReport(params=[], count=0, degenerate=True)
    diffs = np.roll(k, -1) - k
    # sign of each forward difference, carrying the last nonzero sign over plateaus
    signs = np.sign(diffs)
    if not np.any(signs):
        return VertexReport(params=[], count=0, degenerate=True)
    first = int(np.flatnonzero(signs)[0])
    s_prev = signs[first]
    found = []
    dt = c.period / scan
    for step in range(1, scan + 1):
        i = (first + step) % scan
        s = signs[i]
        if s == 0:
            continue
        if s != s_prev:
            # extremum of the sample near ts[i]; refine on its neighbourhood
            t_mid = ts[i]
            maximize = s_prev > 0
            t_star = _golden(lambda x: signed_curvature(c, x), t_mid - 1.5 * dt, t_mid + 1.5 * dt, maximize)
            found.append(c.wrap(t_star))
        s_prev = s
    found = sorted(found)
    uniq = []
    for t in found:
        if not uniq or abs(t - uniq[-1]) > 2 * dt:
            uniq.append(t)
    if len(uniq) > 1 and c.period - (uniq[-1] - uniq[0]) < 2 * dt:
        uniq.pop()
    return VertexReport(params=uniq, count=len(uniq), degenerate=False)
