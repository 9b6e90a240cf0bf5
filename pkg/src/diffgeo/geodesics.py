"""Geodesic shooting, exponential and logarithmic maps, Clairaut's invariant
and a mesh-based shortest-path oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, sparse
from scipy.sparse import csgraph

from . import numeric
from .errors import Disconnected, InputError, LeftDomain, NoConvergence, NotTangent, OnAxis
from .numeric import DEFAULT_TOL, Tolerances
from .surfaces import Chart, Surface, frame

STENCIL_16 = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]


# ---------------------------------------------------------------------------
# geodesic equation


def geodesic_rhs(ch: Chart):
    """Right-hand side of the geodesic equation in chart coordinates.

    State is (u, v, u', v'); the accelerations solve
    ``G (u'', v'') = -(<A, s_u>, <A, s_v>)`` where ``A`` collects the
    second-derivative terms of the ambient acceleration.
    """

    def rhs(t, y):
        u, v, du, dv = y
        su, sv = ch.partials(u, v)
        suu, suv, svv = ch.second(u, v)
        A = suu * (du * du) + suv * (2 * du * dv) + svv * (dv * dv)
        E, F, G = su @ su, su @ sv, sv @ sv
        a, b = -(A @ su), -(A @ sv)
        det = E * G - F * F
        return np.array([du, dv, (G * a - F * b) / det, (E * b - F * a) / det])

    return rhs


def tangent_coords(ch: Chart, u: float, v: float, w, check: bool = True):
    """Coordinates (a, b) with a s_u + b s_v = w."""
    su, sv = ch.partials(u, v)
    J = np.column_stack([su, sv])
    ab, *_ = np.linalg.lstsq(J, np.asarray(w, dtype=float), rcond=None)
    if check:
        resid = float(np.linalg.norm(J @ ab - w))
        if resid > 1e-7 * max(1.0, float(np.linalg.norm(w))):
            raise NotTangent(f"vector is not tangent (normal part {resid:.2e})")
    return ab


@dataclass
class GeodesicPath:
    """Dense geodesic sample. ``chart_ids[k]`` names the chart in which
    ``chart_coords[k]`` is expressed."""

    surface: Surface
    times: np.ndarray
    chart_ids: np.ndarray
    chart_coords: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    segments: list = field(default_factory=list)  # (chart id, ScalarPath)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @property
    def final_velocity(self) -> np.ndarray:
        return self.velocities[-1]

    def state(self, t: float):
        """(chart id, (u, v, u', v')) at time t from the dense output."""
        for cid, seg in self.segments:
            if t <= seg.t1 + 1e-15:
                return cid, seg(max(t, seg.t0))
        cid, seg = self.segments[-1]
        return cid, seg(seg.t1)

    def point_at(self, t: float) -> np.ndarray:
        cid, y = self.state(t)
        return self.surface.charts[cid].point(y[0], y[1])

    def velocity_at(self, t: float) -> np.ndarray:
        cid, y = self.state(t)
        su, sv = self.surface.charts[cid].partials(y[0], y[1])
        return su * y[2] + sv * y[3]

    def to_rows(self):
        """CSV rows (t, u, v, x, y, z)."""
        return [
            (float(t), float(c[0]), float(c[1]), float(p[0]), float(p[1]), float(p[2]))
            for t, c, p in zip(self.times, self.chart_coords, self.points)
        ]


def _start_state(surf: Surface, p, v, uv=None, chart_id=None):
    if uv is not None:
        cid = 0 if chart_id is None else chart_id
        u0, v0 = uv
    else:
        cid, (u0, v0) = surf.locate(p)
    ch = surf.charts[cid]
    ab = tangent_coords(ch, u0, v0, v)
    return cid, np.array([u0, v0, ab[0], ab[1]])


def _reanchor(surf: Surface, cid: int, y):
    """Move a state into a chart where it is safely interior, if possible."""
    ch = surf.charts[cid]
    if ch.safe(y[0], y[1]):
        return cid, y
    p = ch.point(y[0], y[1])
    su, sv = ch.partials(y[0], y[1])
    w = su * y[2] + sv * y[3]
    for j, other in enumerate(surf.charts):
        if j == cid or other.inverse is None:
            continue
        with np.errstate(all="ignore"):
            u, v = other.inverse(p)
        if not (np.isfinite(u) and np.isfinite(v)) or not other.safe(u, v):
            continue
        ab = tangent_coords(other, u, v, w, check=False)
        return j, np.array([u, v, ab[0], ab[1]])
    if ch.contains(y[0], y[1]):
        return cid, y
    raise LeftDomain(f"geodesic left the domain of {ch.name} at {p}")


def geodesic_shoot(
    surf: Surface,
    p,
    v,
    T: float,
    tol: Tolerances = DEFAULT_TOL,
    uv=None,
    chart_id=None,
    max_step: Optional[float] = None,
    dense: bool = True,
    t_stops=None,
    truncate: bool = False,
) -> GeodesicPath:
    """Solve the geodesic equation from ``p`` with initial velocity ``v`` for time ``T``.

    ``p`` and ``v`` are ambient vectors; alternatively pass chart
    coordinates ``uv`` (and ``chart_id``) for the start point.
    """
    if T < 0:
        raise InputError("duration must be nonnegative")
    cid, y = _start_state(surf, p, v, uv, chart_id)
    cid, y = _reanchor(surf, cid, y)
    speed = float(np.linalg.norm(np.asarray(v, dtype=float)))
    if max_step is None and dense:
        # resolve curvature scales of order one; keeps dense output accurate
        max_step = 0.05 / speed if speed > 0 else None
    segments = []
    t = 0.0
    multi = len(surf.charts) > 1
    while True:
        ch = surf.charts[cid]
        if T == 0 or t >= T:
            break

        def stop(tt, yy, ch=ch):
            return not ch.safe(yy[0], yy[1]) if multi else not ch.contains(yy[0], yy[1])

        seg = numeric.ode_solve(geodesic_rhs(ch), t, y, T, tol, stop=stop, max_step=max_step, t_stops=t_stops)
        segments.append((cid, seg))
        t, y = seg.t1, seg.final
        if t >= T:
            break
        if not multi:
            if not ch.contains(y[0], y[1]):
                if truncate:
                    break
                raise LeftDomain(f"geodesic left the domain of {ch.name}")
            continue
        try:
            cid, y = _reanchor(surf, cid, y)
        except LeftDomain:
            if truncate:
                break
            raise
    if not segments:
        ch = surf.charts[cid]
        seg = numeric.ScalarPath([0.0, 1e-300], [y, y])
        segments.append((cid, seg))
    return _assemble(surf, segments)


def _assemble(surf: Surface, segments) -> GeodesicPath:
    times, ids, coords, pts, vels = [], [], [], [], []
    for k, (cid, seg) in enumerate(segments):
        ch = surf.charts[cid]
        start = 0 if k == 0 else 1
        ts = seg.times[start:]
        Y = seg.values[start:]
        U, V = Y[:, 0], Y[:, 1]
        P = ch.point(U, V)
        su, sv = ch.partials(U, V)
        W = su * Y[:, 2:3] + sv * Y[:, 3:4]
        times.append(ts)
        ids.append(np.full(len(ts), cid))
        coords.append(np.column_stack([U, V]))
        pts.append(P.reshape(-1, 3))
        vels.append(W.reshape(-1, 3))
    return GeodesicPath(
        surf,
        np.concatenate(times),
        np.concatenate(ids),
        np.vstack(coords),
        np.vstack(pts),
        np.vstack(vels),
        segments,
    )


def geodesic_residuals(path: GeodesicPath):
    """(max relative speed drift, max tangential acceleration relative to |v|^2)."""
    surf = path.surface
    speeds = np.linalg.norm(path.velocities, axis=1)
    v0 = speeds[0]
    drift = float(np.max(np.abs(speeds - v0))) / v0 if v0 else 0.0
    worst = 0.0
    for cid, seg in path.segments:
        ch = surf.charts[cid]
        rhs = geodesic_rhs(ch)
        for y in seg.values:
            u, v, du, dv = y
            acc = rhs(0.0, y)
            su, sv = ch.partials(u, v)
            suu, suv, svv = ch.second(u, v)
            gamma2 = su * acc[2] + sv * acc[3] + suu * du * du + 2 * suv * du * dv + svv * dv * dv
            N = np.cross(su, sv)
            N /= np.linalg.norm(N)
            tang = gamma2 - (gamma2 @ N) * N
            worst = max(worst, float(np.linalg.norm(tang)) / max(v0 * v0, 1e-300))
    return drift, worst


def path_total_curvature(path: GeodesicPath) -> float:
    """Integral of the curvature of the traced space curve, by Simpson's
    rule over each chart segment's accepted steps refined by dense output."""
    total = 0.0
    for cid, seg in path.segments:
        ch = path.surface.charts[cid]
        rhs = geodesic_rhs(ch)
        ts = seg.times
        fine = np.concatenate([np.linspace(a, b, 9)[:-1] for a, b in zip(ts[:-1], ts[1:])] + [ts[-1:]])
        vals = []
        for t in fine:
            y = seg(t)
            u, v, du, dv = y
            acc = rhs(t, y)
            su, sv = ch.partials(u, v)
            suu, suv, svv = ch.second(u, v)
            g2 = su * acc[2] + sv * acc[3] + suu * du * du + 2 * suv * du * dv + svv * dv * dv
            g1 = su * du + sv * dv
            vals.append(float(np.linalg.norm(np.cross(g1, g2))) / float(g1 @ g1))
        vals = np.array(vals)
        # Simpson on each pair of sub-intervals (8 per step keeps counts even)
        h = np.diff(fine)
        total += float(np.sum((h[0::2] + h[1::2]) / 6 * (vals[0:-1:2] + 4 * vals[1::2] + vals[2::2])))
    return total


def exp_map(surf: Surface, p, v, tol: Tolerances = DEFAULT_TOL, **kw) -> np.ndarray:
    """exp_p(v): the point reached at time 1 by the geodesic with velocity v."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0:
        cid, (u0, v0) = surf.locate(p)
        return surf.charts[cid].point(u0, v0)
    kw.setdefault("dense", False)
    return geodesic_shoot(surf, p, v, 1.0, tol, **kw).end


def tangent_basis(surf: Surface, p):
    """Orthonormal basis (e1, e2) of the tangent plane at p and the normal."""
    cid, (u, v) = surf.locate(p)
    su, sv, N = frame(surf.charts[cid], u, v)
    e1 = su / np.linalg.norm(su)
    return e1, np.cross(N, e1), N


def log_map(
    surf: Surface,
    p,
    q,
    r_max: float,
    tol: Tolerances = DEFAULT_TOL,
    n_scan: int = 64,
    max_iter: int = 40,
) -> np.ndarray:
    """Tangent vector v at p with exp_p(v) = q.

    Gauss-Newton on the tangent-plane coordinates of v. The first seed is
    the chart-coordinate direction towards q at the chord length; if that
    does not converge, the best of ``n_scan`` directions at the chord length
    is used instead.
    """
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    e1, e2, _ = tangent_basis(surf, p)
    chord = float(np.linalg.norm(q - p))
    if chord == 0.0:
        return np.zeros(3)
    target = 1e-6 * r_max

    def endpoint(x, tl=tol):
        w = x[0] * e1 + x[1] * e2
        return exp_map(surf, p, w, tl)

    def newton(x):
        F = endpoint(x) - q
        res = float(np.linalg.norm(F))
        for _ in range(max_iter):
            if res <= 0.01 * target:
                break
            h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
            J = np.column_stack([(endpoint(x + h * e) - q - F) / h for e in np.eye(2)])
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
            lam = 1.0
            while lam > 1e-4:
                x_new = x + lam * step
                try:
                    F_new = endpoint(x_new) - q
                except (LeftDomain, numeric.StepUnderflow):
                    lam *= 0.5
                    continue
                r_new = float(np.linalg.norm(F_new))
                if r_new < res:
                    x, F, res = x_new, F_new, r_new
                    break
                lam *= 0.5
            else:
                break
        return x, res

    def acceptable(x, res):
        return res <= target and np.linalg.norm(x) <= r_max * (1 + 1e-9)

    x, res = None, math.inf
    # cheap first attempt: direction of the coordinate difference in p's chart
    seed = _chart_seed(surf, p, q, e1, e2)
    if seed is not None:
        try:
            x, res = newton(seed)
        except (LeftDomain, numeric.StepUnderflow):
            x = None
    if x is None or not acceptable(x, res):
        loose = tol.scaled(1e4)
        best, best_r = None, math.inf
        for k in range(n_scan):
            th = 2 * math.pi * k / n_scan
            xs = chord * np.array([math.cos(th), math.sin(th)])
            try:
                r = float(np.linalg.norm(endpoint(xs, loose) - q))
            except (LeftDomain, numeric.StepUnderflow):
                continue
            if r < best_r:
                best, best_r = xs, r
        if best is None:
            raise NoConvergence("no scan direction could be shot", None, math.inf)
        x2, res2 = newton(best)
        if x is None or acceptable(x2, res2) or res2 < res:
            x, res = x2, res2
    v = x[0] * e1 + x[1] * e2
    if res > target:
        raise NoConvergence(f"log map residual {res:.2e} above {target:.2e}", v, res)
    if np.linalg.norm(v) > r_max * (1 + 1e-9):
        raise NoConvergence(f"|log| = {np.linalg.norm(v):.4g} exceeds the reliable radius {r_max}", v, res)
    return v


def _chart_seed(surf: Surface, p, q, e1, e2):
    """Tangent-plane guess for log_p(q) from the coordinate difference in
    the chart containing p, rescaled to the chord length."""
    cid, (u0, v0) = surf.locate(p)
    ch = surf.charts[cid]
    if ch.inverse is None:
        return None
    with np.errstate(all="ignore"):
        u1, v1 = ch.inverse(q)
    if not (np.isfinite(u1) and np.isfinite(v1)):
        return None
    du, dv = u1 - u0, v1 - v0
    if ch.uperiod:
        du = (du + ch.uperiod / 2) % ch.uperiod - ch.uperiod / 2
    if ch.vperiod:
        dv = (dv + ch.vperiod / 2) % ch.vperiod - ch.vperiod / 2
    su, sv = ch.partials(u0, v0)
    w = su * du + sv * dv
    x = np.array([w @ e1, w @ e2])
    n = float(np.linalg.norm(x))
    if n == 0:
        return None
    return x * float(np.linalg.norm(q - p)) / n


def geodesic_between(surf: Surface, p, q, r_max: float, tol: Tolerances = DEFAULT_TOL) -> GeodesicPath:
    """The geodesic [0, 1] -> surface from p to q found by the log map."""
    v = log_map(surf, p, q, r_max, tol)
    return geodesic_shoot(surf, p, v, 1.0, tol)


def intrinsic_distance(surf: Surface, p, q, r_max: float, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(np.linalg.norm(log_map(surf, p, q, r_max, tol)))


def clairaut_invariant(path: GeodesicPath, t: Optional[float] = None, k: Optional[int] = None) -> float:
    """r * cos(theta) at time t (or at sample k): r is the distance to the axis,
    theta the angle between the velocity and the parallel. Signed by the
    sense of rotation about the axis."""
    axis = path.surface.axis
    if axis is None:
        raise InputError("Clairaut's relation needs a surface of revolution")
    o, a = axis
    if k is not None:
        p, w = path.points[k], path.velocities[k]
    else:
        p, w = path.point_at(t), path.velocity_at(t)
    radial = p - o - ((p - o) @ a) * a
    r = float(np.linalg.norm(radial))
    if r <= 1e-12:
        raise OnAxis("point lies on the axis of rotation")
    e_par = np.cross(a, radial / r)
    return r * float(w @ e_par) / float(np.linalg.norm(w))


# ---------------------------------------------------------------------------
# shortest-path oracle


class ShortestPathMesh:
    """Grid graph over a chart rectangle with 16-neighbour stencil and chord
    weights; queries return Dijkstra lengths, optionally refined by direct
    minimization of the polyline length."""

    def __init__(self, surf: Surface, n: int = 128, region=None):
        self.surf = surf
        ch = self.chart = surf.global_chart
        if region is None:
            region = (*ch.udomain, *ch.vdomain)
        u0, u1, v0, v1 = region
        self.uwrap = bool(ch.uperiod) and abs((u1 - u0) - ch.uperiod) < 1e-12
        self.vwrap = bool(ch.vperiod) and abs((v1 - v0) - ch.vperiod) < 1e-12
        self.n = n
        self.us = u0 + (u1 - u0) * np.arange(n) / n if self.uwrap else np.linspace(u0, u1, n)
        self.vs = v0 + (v1 - v0) * np.arange(n) / n if self.vwrap else np.linspace(v0, v1, n)
        self.region = region
        U, V = np.meshgrid(self.us, self.vs, indexing="ij")
        self.nodes = ch.point(U, V).reshape(-1, 3)
        rows, cols = [], []
        I, Jg = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        for di, dj in STENCIL_16:
            I2, J2 = I + di, Jg + dj
            ok = np.ones_like(I, dtype=bool)
            if self.uwrap:
                I2 = I2 % n
            else:
                ok &= (I2 >= 0) & (I2 < n)
            if self.vwrap:
                J2 = J2 % n
            else:
                ok &= (J2 >= 0) & (J2 < n)
            rows.append((I * n + Jg)[ok])
            cols.append((I2 * n + J2)[ok])
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        w = np.linalg.norm(self.nodes[self.rows] - self.nodes[self.cols], axis=1)
        # explicit zeros would be dropped by the sparse format (degenerate seams)
        self.weights = np.maximum(w, 1e-15)

    def _attach(self, uv):
        """Grid nodes surrounding chart point uv."""
        out = []
        for coord, axis, wrap in ((uv[0], self.us, self.uwrap), (uv[1], self.vs, self.vwrap)):
            step = axis[1] - axis[0]
            i = int(math.floor((coord - axis[0]) / step))
            idx = [i - 1, i, i + 1, i + 2]
            if wrap:
                idx = [k % self.n for k in idx]
            else:
                idx = [k for k in idx if 0 <= k < self.n]
            out.append(idx)
        return [i * self.n + j for i in out[0] for j in out[1]]

    def query(self, p, q, refine: bool = True, m: int = 200):
        """(length, polyline) of an approximate shortest path from p to q."""
        p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        ch = self.chart
        uvp, uvq = ch.wrap(*ch.inverse(p)), ch.wrap(*ch.inverse(q))
        N = self.n * self.n
        src, dst = N, N + 1
        extra_r, extra_c, extra_w = [], [], []
        for node_id, pt, uv in ((src, p, uvp), (dst, q, uvq)):
            for k in self._attach(uv):
                extra_r.append(node_id)
                extra_c.append(k)
                extra_w.append(max(float(np.linalg.norm(self.nodes[k] - pt)), 1e-15))
        rows = np.concatenate([self.rows, extra_r])
        cols = np.concatenate([self.cols, extra_c])
        w = np.concatenate([self.weights, extra_w])
        G = sparse.csr_matrix((w, (rows, cols)), shape=(N + 2, N + 2))
        dist, pred = csgraph.dijkstra(G, directed=False, indices=src, return_predecessors=True)
        if not np.isfinite(dist[dst]):
            raise Disconnected("target not reachable on the grid graph")
        chain = [dst]
        while chain[-1] != src:
            chain.append(int(pred[chain[-1]]))
        chain.reverse()
        allpts = np.vstack([self.nodes, p, q])
        poly = allpts[chain]
        length = float(dist[dst])
        if refine:
            length, poly = refine_polyline(self.surf, poly, m)
        return length, poly


def _surface_param(surf: Surface):
    """(encode, decode, jacobian) for a smooth parametrization used by the
    polyline refinement. The sphere uses radial projection of R^3; other
    surfaces use their global chart."""
    if surf.kind == "sphere":
        R = surf.params["R"]

        def enc(P):
            return P.copy()

        def dec(Y):
            return R * Y / np.linalg.norm(Y, axis=1, keepdims=True)

        def vjp(Y, G):
            nrm = np.linalg.norm(Y, axis=1, keepdims=True)
            X = Y / nrm
            return R * (G - np.sum(G * X, axis=1, keepdims=True) * X) / nrm

        return enc, dec, vjp, 3
    ch = surf.global_chart

    def enc(P):
        uv = np.array([ch.inverse(x) for x in P])
        for k, per in ((0, ch.uperiod), (1, ch.vperiod)):
            if per:
                uv[:, k] = np.unwrap(uv[:, k], period=per)
        return uv

    def dec(Y):
        return ch.point(Y[:, 0], Y[:, 1])

    def vjp(Y, G):
        su, sv = ch.partials(Y[:, 0], Y[:, 1])
        return np.column_stack([np.sum(su * G, axis=1), np.sum(sv * G, axis=1)])

    return enc, dec, vjp, 2


def refine_polyline(surf: Surface, poly, m: int = 200):
    """Resample a polyline with m vertices on the surface and minimize its
    length with fixed endpoints."""
    poly = np.asarray(poly, dtype=float)
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0:
        return 0.0, poly[[0, -1]]
    s = np.linspace(0.0, cum[-1], m)
    res = np.column_stack([np.interp(s, cum, poly[:, k]) for k in range(3)])
    enc, dec, vjp, dim = _surface_param(surf)
    if surf.kind == "sphere":
        Y = res.copy()
    else:
        # encode in chart coordinates by interpolating the encoded vertices
        Yp = enc(poly)
        Y = np.column_stack([np.interp(s, cum, Yp[:, k]) for k in range(dim)])
    Y0, Y1 = Y[0].copy(), Y[-1].copy()

    def fun(x):
        Z = np.vstack([Y0, x.reshape(-1, dim), Y1])
        P = dec(Z)
        d = np.diff(P, axis=0)
        ln = np.linalg.norm(d, axis=1)
        u = d / np.maximum(ln, 1e-300)[:, None]
        gP = np.zeros_like(P)
        gP[:-1] -= u
        gP[1:] += u
        g = vjp(Z, gP)[1:-1]
        return float(ln.sum()), g.ravel()

    out = optimize.minimize(fun, Y[1:-1].ravel(), jac=True, method="L-BFGS-B", options={"maxiter": 5000, "gtol": 1e-12, "ftol": 1e-15})
    Z = np.vstack([Y0, out.x.reshape(-1, dim), Y1])
    P = dec(Z)
    return float(np.linalg.norm(np.diff(P, axis=0), axis=1).sum()), P


def _mesh_region(surf: Surface, p, q, margin: float = 1.0):
    ch = surf.global_chart
    uvp, uvq = ch.inverse(np.asarray(p, float)), ch.inverse(np.asarray(q, float))
    region = []
    for k, (lo, hi), per in ((0, ch.udomain, ch.uperiod), (1, ch.vdomain, ch.vperiod)):
        if per:
            region += [lo, hi]
            continue
        a, b = sorted((uvp[k], uvq[k]))
        pad = margin * max(b - a, 0.5)
        region += [max(lo, a - pad), min(hi, b + pad)]
    return tuple(region)


def mesh_shortest_path(surf: Surface, p, q, n: int = 128, refine: bool = True, region=None):
    """Shortest path between p and q on a chart grid graph (16-neighbour
    stencil, chord weights). Returns (length, ambient polyline).

    With ``refine=False`` the raw Dijkstra length is returned, an upper bound
    converging as n grows; with refinement the polyline is relaxed to a
    discrete geodesic.
    """
    if region is None:
        region = _mesh_region(surf, p, q)
    mesh = ShortestPathMesh(surf, n, region)
    return mesh.query(p, q, refine=refine)
