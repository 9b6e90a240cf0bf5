"""Command-line front end.

Every subcommand reads a JSON definition (``--def``), runs one operation
(``--op``) and writes a deterministic JSON report (``--out``, default
stdout) holding ``value``, ``method``, ``tolerance_estimate`` and
``inputs_digest``. Operations that produce traces also write a CSV file
when ``--csv`` is given.

Exit status: 0 success, 2 numerical failure (a tolerance or convergence
target was missed), 3 input error.
"""

from __future__ import annotations

import os

_threads = os.environ.get("DIFFGEO_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import math  # noqa: E402
import sys  # noqa: E402
from pathlib import Path  # noqa: E402
from typing import Callable, Dict, Optional, Tuple  # noqa: E402

import numpy as np  # noqa: E402

from . import comparison as cmp  # noqa: E402
from . import curve_global as cg  # noqa: E402
from . import curves as cv  # noqa: E402
from . import errors  # noqa: E402
from . import geodesics as geo  # noqa: E402
from . import io  # noqa: E402
from . import reconstruction as rec  # noqa: E402
from . import suites  # noqa: E402
from . import surfaces as sf  # noqa: E402
from . import transport as tr  # noqa: E402
from .expr import Expr  # noqa: E402
from .numeric import DEFAULT_TOL, Tolerances  # noqa: E402

NUMERICAL_FAILURES = (
    errors.ToleranceFailure,
    errors.ToleranceNotMet,
    errors.StepUnderflow,
    errors.DomainTooSmall,
    errors.NoConvergence,
    errors.LeftDomain,
    errors.ShootFailure,
    errors.RayNotMinimizing,
    errors.Disconnected,
)

SUBCOMMANDS = ("curve", "surface", "geodesic", "transport", "gauss-bonnet", "crofton", "compare", "reconstruct", "verify")


class Context:
    """Parsed arguments plus the loaded definition."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.base: Optional[Path] = None
        self.definition: dict = {}
        if args.definition:
            self.definition = io.load_json(args.definition)
            self.base = Path(args.definition).resolve().parent
        self.tol = DEFAULT_TOL
        if args.tol is not None:
            try:
                self.tol = Tolerances(quad_abs_tol=args.tol, quad_rel_tol=args.tol, ode_abs_tol=args.tol, ode_rel_tol=args.tol)
            except ValueError as exc:
                raise errors.InputError(str(exc)) from exc
        self.csv: Optional[Tuple[list, np.ndarray]] = None

    def need(self, name: str):
        val = getattr(self.args, name)
        if val is None:
            raise errors.InputError(f"--{name.replace('_', '-')} is required for {self.args.command} {self.args.op}")
        return val

    def need_def(self, key: str):
        if key not in self.definition:
            raise errors.InputError(f"definition needs {key!r} for {self.args.command} {self.args.op}")
        return self.definition[key]


def _floats(text: str, n: Optional[int] = None) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise errors.InputError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise errors.InputError(f"expected {n} numbers, got {text!r}")
    return vals


def _report(value, method: str, tolerance_estimate, **extra) -> dict:
    out = {"value": value, "method": method, "tolerance_estimate": tolerance_estimate}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# curve


def _curve(ctx: Context) -> cv.ParamCurve:
    return io.curve_from_def(ctx.definition, ctx.base)


def _t(ctx: Context, c: cv.ParamCurve) -> float:
    return float(ctx.args.t) if ctx.args.t is not None else 0.5 * sum(c.domain)


def curve_length(ctx):
    c = _curve(ctx)
    return _report(cv.curve_length(c, tol=ctx.tol), "adaptive quadrature of the speed", ctx.tol.quad_rel_tol)


def curve_arclength(ctx):
    c = _curve(ctx)
    a = cv.to_arclength(c)
    n = ctx.args.n or 201
    s = np.linspace(*a.domain, n)
    ctx.csv = (["t", "x", "y", "z"][: a.dim + 1], np.column_stack([s, a.points(s)]))
    return _report(a.domain[1], "arc-length reparametrization by inverse interpolation", 1e-9, n_samples=n)


def curve_frenet(ctx):
    c = _curve(ctx)
    t = _t(ctx, c)
    fr = cv.frenet(c, t)
    val = {"T": fr.T, "N": fr.N, "B": fr.B, "kappa": fr.kappa, "tau": fr.tau, "skappa": fr.skappa}
    return _report(val, "Frenet formulas from derivatives up to order 3", ctx.tol.fd_step**2, t=t)


def curve_signed_curvature(ctx):
    c = _curve(ctx)
    t = _t(ctx, c)
    return _report(cv.signed_curvature(c, t), "det(c', c'') / |c'|^3", ctx.tol.fd_step**2, t=t)


def curve_osculating_circle(ctx):
    c = _curve(ctx)
    t = _t(ctx, c)
    osc = cv.osculating_circle(c, t)
    if isinstance(osc, cv.Line2D):
        val = {"line": {"point": osc.point, "direction": osc.direction}}
    else:
        val = {"center": osc.center, "radius": osc.radius}
    return _report(val, "centre c + N / skappa", ctx.tol.fd_step**2, t=t)


def curve_evolute(ctx):
    c = _curve(ctx)
    e = cv.evolute(c)
    n = ctx.args.n or 201
    ts = np.linspace(*e.domain, n)
    ctx.csv = (["t", "x", "y"], np.column_stack([ts, e.points(ts)]))
    t = _t(ctx, c)
    return _report(e.point(t), "locus of osculating centres", ctx.tol.fd_step**2, t=t, n_samples=n)


def curve_vertices(ctx):
    rep = cv.vertices(_curve(ctx))
    return _report(rep.params, "sign changes of the curvature derivative, golden-section refinement", 1e-9, count=rep.count, degenerate=rep.degenerate)


def curve_total_curvature(ctx):
    return _report(cg.total_curvature(_curve(ctx), ctx.tol), "adaptive quadrature of kappa |c'|", ctx.tol.quad_rel_tol)


def curve_total_signed_curvature(ctx):
    return _report(cg.total_signed_curvature(_curve(ctx), ctx.tol), "adaptive quadrature of skappa |c'|", ctx.tol.quad_rel_tol)


def curve_polyline_total_curvature(ctx):
    d = ctx.definition
    if d.get("kind") == "polyline":
        pts = io.read_csv_rows(io._resolve(d["csv"], ctx.base), 2) if "csv" in d else np.asarray(ctx.need_def("points"), float)
        closed = bool(d.get("closed", False))
    else:
        c = _curve(ctx)
        pts = cg.inscribed_polyline(c, ctx.args.n or 256)
        closed = c.closed
    return _report(cg.polyline_total_curvature(pts, closed), "sum of turning angles", 0.0, n_samples=len(pts))


def curve_max_inscribed_disc(ctx):
    center, radius = cg.max_inscribed_disc(_curve(ctx), ctx.args.grid or 100)
    return _report({"center": center, "radius": radius}, "grid search of the distance to the boundary", None)


def curve_is_convex(ctx):
    return _report(cg.is_convex(_curve(ctx)), "signed curvature keeps one sign on a simple curve", None)


def curve_samples(ctx):
    c = _curve(ctx)
    n = ctx.args.n or 201
    ts = np.linspace(*c.domain, n)
    ctx.csv = (["t", "x", "y", "z"][: c.dim + 1], np.column_stack([ts, c.points(ts)]))
    return _report(n, "uniform parameter samples", 0.0)


# ---------------------------------------------------------------------------
# crofton


def crofton_estimate(ctx):
    c = _curve(ctx)
    ref = cv.curve_length(c, tol=ctx.tol)
    if c.dim == 2:
        n = ctx.args.n or 1024
        est = cg.crofton_length_plane(c, n)
        method = "mean projection length over line directions, coefficient pi/2"
    else:
        mode = ctx.args.op if ctx.args.op in ("line", "plane") else "line"
        n = ctx.args.n or 4096
        est = cg.crofton_length_space(c, mode, n)
        method = f"mean projection length onto {mode}s, coefficient {'2' if mode == 'line' else '4/pi'}"
    return _report(est, method, abs(est / ref - 1), reference_length=ref, n_dirs=n)


# ---------------------------------------------------------------------------
# reconstruct


def _rows_or_csv(spec, base, cols):
    if isinstance(spec, dict) and "csv" in spec:
        return io.read_csv_rows(io._resolve(spec["csv"], base), cols)
    return np.asarray(spec, dtype=float)


def reconstruct_build(ctx):
    d = ctx.definition
    L = io._num(ctx.need_def("length"), "length")
    dim = int(d.get("dim", 3 if "tau" in d else 2))
    if dim == 2:
        sk = io.scalar_function(ctx.need_def("skappa"), ctx.base)
        pose = rec.InitialPose2D(d.get("point", [0.0, 0.0]), d.get("direction", [1.0, 0.0]))
        c = rec.reconstruct_plane(sk, L, pose, ctx.tol)
    else:
        k = io.scalar_function(ctx.need_def("kappa"), ctx.base)
        tau = io.scalar_function(ctx.need_def("tau"), ctx.base)
        if "T" in d:
            frame = rec.InitialFrame3D(d.get("point", [0.0, 0.0, 0.0]), d["T"], d["N"], d["B"])
        else:
            frame = rec.InitialFrame3D.standard(d.get("point", [0.0, 0.0, 0.0]))
        c = rec.reconstruct_space(k, tau, L, frame, ctx.tol)
    n = ctx.args.n or 201
    s = np.linspace(0.0, L, n)
    pts = c.points(s)
    ctx.csv = (["t", "x", "y", "z"][: c.dim + 1], np.column_stack([s, pts]))
    return _report({"end_point": pts[-1]}, "adaptive Runge-Kutta integration of the Frenet system", ctx.tol.ode_rel_tol, length=L)


def reconstruct_align(ctx):
    a = _rows_or_csv(ctx.need_def("a"), ctx.base, 2)
    b = _rows_or_csv(ctx.need_def("b"), ctx.base, 2)
    al = rec.rigid_align(a, b)
    val = {"rotation": al.rotation, "translation": al.translation, "rms_residual": al.rms_residual, "degenerate": al.degenerate}
    return _report(val, "orthogonal Procrustes (SVD)", al.rms_residual)


def reconstruct_round_trip(ctx):
    rms, L = rec.round_trip(_curve(ctx), ctx.args.n or 1025)
    return _report(rms / L, "extract curvature profile, rebuild, align; RMS / length", rms / L, length=L)


# ---------------------------------------------------------------------------
# surface


def _surface(ctx, key: Optional[str] = None) -> sf.Surface:
    d = ctx.definition if key is None else ctx.need_def(key)
    if not isinstance(d, dict):
        raise errors.InputError("surface definition must be an object")
    return io.surface_from_def(d)


def _chart(ctx, surf: sf.Surface) -> sf.Chart:
    cid = ctx.args.chart
    if cid is None:
        return surf.global_chart
    if not 0 <= cid < len(surf.charts):
        raise errors.InputError(f"chart {cid} does not exist (surface has {len(surf.charts)})")
    return surf.charts[cid]


def _uv(ctx, surf, ch=None) -> Tuple[float, float]:
    ch = ch or _chart(ctx, surf)
    u, v = _floats(ctx.need("at"), 2)
    if not ch.contains(u, v):
        raise errors.InputError(f"({u}, {v}) is outside the chart domain")
    return u, v


def _chart_vector(ch: sf.Chart, u, v, ab) -> np.ndarray:
    su, sv = ch.partials(u, v)
    return ab[0] * su + ab[1] * sv


def surface_frame(ctx):
    surf = _surface(ctx)
    ch = _chart(ctx, surf)
    u, v = _uv(ctx, surf, ch)
    su, sv, n = sf.frame(ch, u, v)
    return _report({"s_u": su, "s_v": sv, "normal": n}, "chart partial derivatives", ctx.tol.fd_step**2, at=[u, v])


def surface_shape_operator(ctx):
    surf = _surface(ctx)
    ch = _chart(ctx, surf)
    u, v = _uv(ctx, surf, ch)
    so = sf.shape_operator(ch, u, v)
    return _report({"matrix": so.matrix, "e1": so.e1, "e2": so.e2, "normal": so.normal}, "I^-1 II in an orthonormal tangent basis", ctx.tol.fd_step**2, at=[u, v])


def surface_curvatures(ctx):
    surf = _surface(ctx)
    ch = _chart(ctx, surf)
    u, v = _uv(ctx, surf, ch)
    cd = sf.curvatures(ch, u, v)
    val = {"k1": cd.k1, "k2": cd.k2, "K": cd.K, "H": cd.H, "e1": cd.e1, "e2": cd.e2, "umbilic": cd.umbilic}
    return _report(val, "eigen-decomposition of the shape operator", ctx.tol.fd_step**2, at=[u, v])


def surface_normal_curvature(ctx):
    surf = _surface(ctx)
    ch = _chart(ctx, surf)
    u, v = _uv(ctx, surf, ch)
    w = _chart_vector(ch, u, v, _floats(ctx.need("dir"), 2))
    w = w / np.linalg.norm(w)
    return _report(sf.normal_curvature(ch, u, v, w), "II(w, w) for unit w", ctx.tol.fd_step**2, at=[u, v], direction=w)


def surface_integral_gauss(ctx):
    surf = _surface(ctx)
    return _report(sf.integral_gauss(surf, ctx.tol), "tensor Gauss-Legendre quadrature of K dA over the global chart", ctx.tol.quad_rel_tol)


def surface_area(ctx):
    return _report(sf.area(_surface(ctx), ctx.tol), "tensor Gauss-Legendre quadrature of dA", ctx.tol.quad_rel_tol)


def surface_integral(ctx):
    surf = _surface(ctx)
    ch = _chart(ctx, surf)
    h = Expr.parse(ctx.need("expr"), ("x", "y", "z"))
    region = ctx.definition.get("region") or sf.full_region(ch)
    val = sf.surface_integral(ch, tuple(region), lambda p: h(p[..., 0], p[..., 1], p[..., 2]) + 0 * p[..., 0], ctx.tol)
    return _report(val, "tensor Gauss-Legendre quadrature of h dA", ctx.tol.quad_rel_tol)


def surface_revolution_curvatures(ctx):
    d = ctx.definition
    if d.get("kind") != "revolution":
        raise errors.InputError("revolution-curvatures needs a 'revolution' surface definition")
    gen = cv.to_arclength(io._generatrix(d))
    s = float(ctx.args.t) if ctx.args.t is not None else 0.5 * sum(gen.domain)
    kp, km = sf.revolution_curvatures(gen, s)
    return _report({"k_parallel": kp, "k_meridian": km}, "closed form for a unit-speed generatrix; s is arc length", ctx.tol.fd_step**2, s=s)


# ---------------------------------------------------------------------------
# geodesic


def _start(ctx, surf):
    ch = surf.global_chart if ctx.args.chart is None else _chart(ctx, surf)
    u, v = _uv(ctx, surf, ch)
    p = ch.point(u, v)
    w = _chart_vector(ch, u, v, _floats(ctx.need("dir"), 2)) if ctx.args.dir else None
    return ch, p, w


def _target(ctx, surf, ch):
    u, v = _floats(ctx.need("to"), 2)
    return ch.point(u, v)


def geodesic_shoot(ctx):
    surf = _surface(ctx)
    _, p, w = _start(ctx, surf)
    if w is None:
        raise errors.InputError("--dir is required")
    T = float(ctx.args.T)
    path = geo.geodesic_shoot(surf, p, w, T, ctx.tol, truncate=bool(ctx.definition.get("truncate", False)))
    ctx.csv = (["t", "u", "v", "x", "y", "z"], path.to_rows())
    speed, acc = geo.geodesic_residuals(path)
    val = {"end_point": path.end, "final_velocity": path.final_velocity, "duration": float(path.times[-1])}
    return _report(val, "adaptive Runge-Kutta on the chart geodesic equation with chart hand-off", max(speed, acc), speed_drift=speed, tangential_acceleration=acc)


def geodesic_exp(ctx):
    surf = _surface(ctx)
    _, p, w = _start(ctx, surf)
    if w is None:
        raise errors.InputError("--dir is required")
    return _report(geo.exp_map(surf, p, w, ctx.tol), "geodesic shooting for unit time", ctx.tol.ode_rel_tol)


def geodesic_log(ctx):
    surf = _surface(ctx)
    ch, p, _ = _start(ctx, surf)
    q = _target(ctx, surf, ch)
    r_max = float(ctx.args.r_max)
    w = geo.log_map(surf, p, q, r_max, ctx.tol)
    err = float(np.linalg.norm(geo.exp_map(surf, p, w, ctx.tol) - q))
    return _report({"vector": w, "length": float(np.linalg.norm(w))}, "Gauss-Newton shooting from a chart seed", err)


def geodesic_clairaut(ctx):
    surf = _surface(ctx)
    _, p, w = _start(ctx, surf)
    if w is None:
        raise errors.InputError("--dir is required")
    path = geo.geodesic_shoot(surf, p, w, float(ctx.args.T), ctx.tol)
    vals = np.array([geo.clairaut_invariant(path, k=k) for k in range(len(path.times))])
    ctx.csv = (["t", "clairaut"], np.column_stack([path.times, vals]))
    rel_sd = float(np.std(vals) / max(abs(np.mean(vals)), 1e-300))
    return _report(float(np.mean(vals)), "r cos(angle to the parallel) along the geodesic", rel_sd, relative_sd=rel_sd)


def geodesic_mesh(ctx):
    surf = _surface(ctx)
    ch, p, _ = _start(ctx, surf)
    q = _target(ctx, surf, ch)
    length, poly = geo.mesh_shortest_path(surf, p, q, ctx.args.grid or 128)
    ctx.csv = (["x", "y", "z"], np.asarray(poly))
    return _report(length, "Dijkstra on a 16-neighbour chart grid, then polyline length minimization", None, n_vertices=len(poly))


# ---------------------------------------------------------------------------
# transport / gauss-bonnet


def _loop(ctx, surf: sf.Surface, d: dict) -> tr.OnSurfaceCurve:
    """Loop from {"uv": [u(t), v(t)], "domain", "chart", "closed"} or
    {"vertices": [[u, v], ...], "r_max", "closed"} (broken geodesic through
    points given in global-chart coordinates)."""
    closed = bool(d.get("closed", True))
    if "vertices" in d:
        ch = surf.global_chart
        pts = [ch.point(*io._pair(v, "vertex")) for v in d["vertices"]]
        return tr.broken_geodesic(surf, pts, float(d.get("r_max", 1.0)), closed, ctx.tol)
    if "uv" not in d:
        raise errors.InputError("loop needs 'uv' expressions or 'vertices'")
    cid = int(d.get("chart", 0))
    if not 0 <= cid < len(surf.charts):
        raise errors.InputError(f"chart {cid} does not exist")
    eu, ev = (Expr.parse(e, ("t",)) for e in d["uv"])
    du, dv = eu.diff("t"), ev.diff("t")
    ddu, ddv = du.diff("t"), dv.diff("t")
    dom = io._pair(d.get("domain", [0.0, 2 * math.pi]), "domain")
    return tr.OnSurfaceCurve.from_uv(
        surf, cid,
        lambda t: np.array([float(eu(t)), float(ev(t))]), dom,
        lambda t: np.array([float(du(t)), float(dv(t))]),
        lambda t: np.array([float(ddu(t)), float(ddv(t))]),
        closed=closed, tol=ctx.tol,
    )


def _surface_and_loop(ctx):
    surf = _surface(ctx, "surface")
    return surf, _loop(ctx, surf, ctx.need_def("loop"))


def transport_vector(ctx):
    surf, loop = _surface_and_loop(ctx)
    piece = loop.pieces[0]
    t0 = piece.domain[0]
    ch = surf.charts[piece.chart_id]
    u, v = piece.uv(t0)
    v0 = _chart_vector(ch, u, v, _floats(ctx.need("dir"), 2))
    res = tr.parallel_transport(loop, v0, ctx.tol)
    rows = []
    for k, (ts, vs) in enumerate(zip(res.times, res.vectors)):
        for t, w in zip(ts, vs):
            rows.append([k, t, *w])
    ctx.csv = (["piece", "t", "vx", "vy", "vz"], np.array(rows))
    return _report({"v0": v0, "v_end": res.v_end}, "adaptive Runge-Kutta on v' = -<v, N'> N with tangent projection", ctx.tol.ode_rel_tol)


def transport_holonomy(ctx):
    _, loop = _surface_and_loop(ctx)
    return _report(tr.holonomy(loop, tol=ctx.tol), "counter-clockwise angle from v0 to its transport around the loop", ctx.tol.ode_rel_tol)


def transport_geodesic_curvature(ctx):
    _, loop = _surface_and_loop(ctx)
    t = float(ctx.args.t) if ctx.args.t is not None else loop.pieces[0].domain[0]
    return _report(tr.geodesic_curvature(loop, t), "<c'', N x c'> / |c'|^3", ctx.tol.fd_step**2, t=t)


def transport_total_geodesic_curvature(ctx):
    _, loop = _surface_and_loop(ctx)
    return _report(tr.total_geodesic_curvature(loop, ctx.tol), "quadrature of k_g ds plus signed external angles", ctx.tol.quad_rel_tol)


def transport_rotation(ctx):
    _, loop = _surface_and_loop(ctx)
    return _report(tr.rotation_of_field(loop, tol=ctx.tol), "rotation of the velocity field relative to parallel transport", ctx.tol.quad_rel_tol)


def gb_disc(ctx):
    surf, loop = _surface_and_loop(ctx)
    center = ctx.definition.get("center")
    rep = tr.gb_residual(tr.DiscRegion(loop, center=None if center is None else io._pair(center, "center")), ctx.tol)
    return _report(rep.residual, "tgc + integral of K dA - 2 pi", max(abs(rep.residual), ctx.tol.quad_rel_tol), tgc=rep.tgc, intK=rep.intK, residual=rep.residual)


def gb_general(ctx):
    surf = _surface(ctx, "surface")
    loops = [_loop(ctx, surf, d) for d in ctx.definition.get("boundaries", [])]
    region = ctx.definition.get("region")
    rep = tr.gb_general(surf, None if region is None else tuple(region), loops, ctx.tol)
    err = abs(rep.chi_estimate - round(rep.chi_estimate))
    return _report(rep.chi_estimate, "(tgc + integral of K dA) / 2 pi", err, tgc=rep.tgc, intK=rep.intK, chi_estimate=rep.chi_estimate)


# ---------------------------------------------------------------------------
# compare


def _points(ctx, surf, key):
    ch = surf.global_chart
    raw = ctx.need_def(key)
    return [ch.point(*io._pair(p, key)) for p in raw]


def _compare_center(ctx, surf):
    ch = surf.global_chart
    u, v = _floats(ctx.need("at"), 2)
    return ch.point(u, v)


def compare_polar_chart(ctx):
    surf = _surface(ctx, "surface")
    p = _compare_center(ctx, surf)
    pc = cmp.polar_chart(surf, p, float(ctx.args.r_max), ctx.args.n or 200, ctx.args.grid or 64, ctx.tol)
    R, TH = np.meshgrid(pc.r, pc.theta, indexing="ij")
    ctx.csv = (["r", "theta", "b"], np.column_stack([R.ravel(), TH.ravel(), pc.b.ravel()]))
    val = {
        "first_zero": pc.first_zero(),
        "radial_speed_error": pc.radial_speed_error(),
        "gauss_lemma_error": pc.gauss_lemma_error(),
        "egregium_discrepancy": cmp.egregium_discrepancy(pc),
    }
    return _report(val, "geodesic shooting on an (r, theta) grid; b = |d/dtheta|", val["radial_speed_error"])


def compare_jacobi(ctx):
    surf = _surface(ctx, "surface")
    p = _compare_center(ctx, surf)
    pc = cmp.polar_chart(surf, p, float(ctx.args.r_max), ctx.args.n or 200, ctx.args.grid or 64, ctx.tol)
    res = cmp.jacobi_residual(pc, surf, ctx.tol)
    return _report(res, "max |b_rr + K b| on the polar grid", res)


def compare_rauch(ctx):
    surf = _surface(ctx, "surface")
    p = _compare_center(ctx, surf)
    tilde = ctx.definition.get("tilde", {"circle": 0.5})
    if "circle" in tilde:
        r = io._num(tilde["circle"], "circle")
        curve = lambda t: (r * math.cos(2 * math.pi * t), r * math.sin(2 * math.pi * t))
    else:
        ea, eb = (Expr.parse(tilde[k], ("t",)) for k in ("a", "b"))
        curve = lambda t: (float(ea(t)), float(eb(t)))
    lt, li = cmp.rauch_compare(surf, p, curve, ctx.args.n or 512, ctx.tol)
    return _report({"tangent_length": lt, "image_length": li}, "Richardson-extrapolated polyline lengths", abs(li) * 1e-6)


def compare_model_triangle(ctx):
    a, b, c = (io._num(x, "side") for x in ctx.need_def("sides"))
    m = cmp.model_triangle(a, b, c)
    return _report({"angles": m.angles, "degenerate": m.degenerate, "vertices": m.vertices()}, "law of cosines", 1e-12)


def _triangle(ctx, surf):
    pts = _points(ctx, surf, "triangle")
    if len(pts) != 3:
        raise errors.InputError("triangle needs three vertices")
    return pts


def compare_hinge(ctx):
    surf = _surface(ctx, "surface")
    x, y, z = _triangle(ctx, surf)
    pairs = cmp.hinge_compare(surf, x, y, z, float(ctx.definition.get("r_max", ctx.args.r_max)), ctx.tol)
    return _report([{"measured": m, "model": mo} for m, mo in pairs], "log-map hinge angles against law-of-cosines angles", 1e-6)


def compare_fatness(ctx):
    surf = _surface(ctx, "surface")
    x, y, z = _triangle(ctx, surf)
    lo, hi = cmp.triangle_fatness(
        surf, x, y, z, n_pairs=ctx.args.n or 10, r_max=float(ctx.definition.get("r_max", ctx.args.r_max)),
        mesh_n=ctx.args.grid or 128, seed=ctx.args.seed, tol=ctx.tol,
    )
    return _report({"min": lo, "max": hi}, "mesh-oracle side-point distances minus model distances", 1e-4)


def compare_record(ctx):
    surf = _surface(ctx, "surface")
    ch = surf.global_chart
    tris = ctx.definition.get("triangles") or [ctx.need_def("triangle")]
    r_max = float(ctx.definition.get("r_max", ctx.args.r_max))
    recs = []
    for tri in tris:
        x, y, z = (ch.point(*io._pair(p, "triangle")) for p in tri)
        recs.append(cmp.comparison_record(surf, x, y, z, r_max, ctx.tol))
    return _report(recs, "hinge comparison per triangle; positive margin means the comparison holds", 1e-6)


def compare_alexandrov(ctx):
    d = ctx.need_def("points")
    keys = ("p", "x", "y", "z", "p2", "x2", "y2", "z2")
    missing = [k for k in keys if k not in d]
    if missing:
        raise errors.InputError(f"points need keys {', '.join(missing)}")
    signs = cmp.alexandrov_signs(*(np.asarray(d[k], dtype=float) for k in keys))
    return _report(list(signs), "signs of the three defining differences", 1e-9)


def compare_busemann(ctx):
    surf = _surface(ctx, "surface")
    ch = surf.global_chart
    ray = ctx.need_def("ray")
    u, v = io._pair(ray["at"], "ray.at")
    w = _chart_vector(ch, u, v, io._pair(ray["dir"], "ray.dir"))
    T = float(ctx.definition.get("T", ctx.args.T))
    lam = cmp.surface_ray(surf, ch.point(u, v), w, T, ctx.tol)
    x = ch.point(*io._pair(ctx.need_def("x"), "x"))
    dist = cmp.log_distance(surf, 3 * T, ctx.tol)
    bv = cmp.busemann(lam, x, T, dist)
    return _report(bv.value, "Richardson extrapolation of d(ray(t), x) - t from t = T/2 and T", abs(bv.value - bv.at_T), at_T=bv.at_T, at_half=bv.at_half, slow=bv.slow, monotone=bv.monotone)


# ---------------------------------------------------------------------------
# verify


def verify(ctx):
    name = ctx.args.suite or "all"
    names = list(suites.SUITES) if name == "all" else [name]
    if any(n not in suites.SUITES for n in names):
        raise errors.InputError(f"unknown suite {name!r}; expected one of all, {', '.join(suites.SUITES)}")
    kw = {"seed": ctx.args.seed}
    if ctx.args.n is not None:
        kw["n"] = ctx.args.n
    results = [suites.run_suite(n, **kw) for n in names]
    for r in results:
        print(r.line(), file=sys.stderr)
    rep = _report([r.as_dict() for r in results], "closed-form and property checks", max(r.worst for r in results))
    rep["passed"] = all(r.passed for r in results)
    return rep


# ---------------------------------------------------------------------------
# dispatch

DISPATCH: Dict[Tuple[str, str], Callable[[Context], dict]] = {
    ("curve", "length"): curve_length,
    ("curve", "arclength"): curve_arclength,
    ("curve", "frenet"): curve_frenet,
    ("curve", "signed-curvature"): curve_signed_curvature,
    ("curve", "osculating-circle"): curve_osculating_circle,
    ("curve", "evolute"): curve_evolute,
    ("curve", "vertices"): curve_vertices,
    ("curve", "total-curvature"): curve_total_curvature,
    ("curve", "total-signed-curvature"): curve_total_signed_curvature,
    ("curve", "polyline-total-curvature"): curve_polyline_total_curvature,
    ("curve", "max-inscribed-disc"): curve_max_inscribed_disc,
    ("curve", "is-convex"): curve_is_convex,
    ("curve", "samples"): curve_samples,
    ("crofton", "estimate"): crofton_estimate,
    ("crofton", "line"): crofton_estimate,
    ("crofton", "plane"): crofton_estimate,
    ("reconstruct", "build"): reconstruct_build,
    ("reconstruct", "align"): reconstruct_align,
    ("reconstruct", "round-trip"): reconstruct_round_trip,
    ("surface", "frame"): surface_frame,
    ("surface", "shape-operator"): surface_shape_operator,
    ("surface", "curvatures"): surface_curvatures,
    ("surface", "normal-curvature"): surface_normal_curvature,
    ("surface", "integral-gauss"): surface_integral_gauss,
    ("surface", "area"): surface_area,
    ("surface", "integral"): surface_integral,
    ("surface", "revolution-curvatures"): surface_revolution_curvatures,
    ("geodesic", "shoot"): geodesic_shoot,
    ("geodesic", "exp"): geodesic_exp,
    ("geodesic", "log"): geodesic_log,
    ("geodesic", "clairaut"): geodesic_clairaut,
    ("geodesic", "mesh"): geodesic_mesh,
    ("transport", "transport"): transport_vector,
    ("transport", "holonomy"): transport_holonomy,
    ("transport", "geodesic-curvature"): transport_geodesic_curvature,
    ("transport", "total-geodesic-curvature"): transport_total_geodesic_curvature,
    ("transport", "rotation"): transport_rotation,
    ("gauss-bonnet", "disc"): gb_disc,
    ("gauss-bonnet", "general"): gb_general,
    ("compare", "polar-chart"): compare_polar_chart,
    ("compare", "jacobi"): compare_jacobi,
    ("compare", "rauch"): compare_rauch,
    ("compare", "model-triangle"): compare_model_triangle,
    ("compare", "hinge"): compare_hinge,
    ("compare", "fatness"): compare_fatness,
    ("compare", "record"): compare_record,
    ("compare", "alexandrov"): compare_alexandrov,
    ("compare", "busemann"): compare_busemann,
    ("verify", "run"): verify,
}

DEFAULT_OP = {"crofton": "estimate", "reconstruct": "build", "gauss-bonnet": "disc", "verify": "run", "geodesic": "shoot", "transport": "holonomy"}


class _Parser(argparse.ArgumentParser):
    """Argument errors become InputError (exit 3) instead of exit 2."""

    def error(self, message):
        raise errors.InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diffgeo", description="Numerical differential geometry of curves and surfaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        ops = sorted(op for cmd, op in DISPATCH if cmd == name)
        p = sub.add_parser(name, help=f"operations: {', '.join(ops)}")
        p.add_argument("--def", dest="definition", help="JSON definition file")
        p.add_argument("--op", choices=ops, default=DEFAULT_OP.get(name))
        p.add_argument("--out", help="JSON report path (default: stdout)")
        p.add_argument("--csv", help="CSV trace path for operations that produce samples")
        p.add_argument("--tol", type=float, help="quadrature and ODE tolerance override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n", type=int, help="sample / direction / suite count")
        p.add_argument("--grid", type=int, help="grid resolution")
        p.add_argument("--t", type=float, help="curve parameter")
        p.add_argument("--at", help="point as u,v chart coordinates")
        p.add_argument("--to", help="second point as u,v chart coordinates")
        p.add_argument("--dir", help="tangent vector as chart components a,b (a s_u + b s_v)")
        p.add_argument("--chart", type=int, help="chart index (default: the global chart)")
        p.add_argument("--T", type=float, default=1.0, help="geodesic duration")
        p.add_argument("--r-max", dest="r_max", type=float, default=1.0, help="radius bound")
        p.add_argument("--expr", help="integrand expression in x, y, z")
        p.add_argument("--suite", help="verification suite name or 'all'")
    return parser


def _inputs(args: argparse.Namespace, definition: dict) -> dict:
    skip = {"out", "csv", "definition"}
    return {"args": {k: v for k, v in sorted(vars(args).items()) if k not in skip}, "definition": definition}


def execute(argv) -> Tuple[int, dict]:
    """Run one command; returns (exit status, report)."""
    args = build_parser().parse_args(argv)
    if args.op is None:
        raise errors.InputError(f"--op is required for {args.command}")
    ctx = Context(args)
    report = DISPATCH[(args.command, args.op)](ctx)
    inputs = _inputs(args, ctx.definition)
    report.update(command=args.command, op=args.op, inputs_digest=io.digest(inputs))
    if args.out:
        io.write_json(args.out, report)
    else:
        sys.stdout.write(io.dumps(report))
    if args.csv:
        if ctx.csv is None:
            raise errors.InputError(f"{args.command} {args.op} produces no CSV trace")
        io.write_csv(args.csv, *ctx.csv)
    if args.command == "verify" and not report["passed"]:
        raise errors.ToleranceFailure("one or more verification suites failed")
    return 0, report


def main(argv=None) -> int:
    try:
        status, _ = execute(sys.argv[1:] if argv is None else argv)
        return status
    except NUMERICAL_FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except errors.DiffGeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
