"""Definition files (JSON/CSV) and deterministic report writing."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import curves, surfaces
from .curves import ParamCurve
from .errors import InputError
from .expr import Expr

CURVE_KINDS = ("helix", "circle", "ellipse", "graph2d", "trig_poly", "samples", "trefoil", "figure_eight", "trochoid", "limacon", "segment")
SURFACE_KINDS = (
    "sphere", "torus", "graph", "revolution", "saddle", "chart_expr",
    "plane", "paraboloid", "cylinder", "catenoid", "pseudosphere", "smooth_cone",
)


# ---------------------------------------------------------------------------
# reading


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path} must hold a JSON object")
    return data


def read_csv_rows(path, min_cols: int = 2) -> np.ndarray:
    """Numeric rows of a CSV file; a non-numeric first row is a header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            raw = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if raw:
        try:
            [float(c) for c in raw[0]]
        except ValueError:
            raw = raw[1:]
    try:
        rows = np.array([[float(c) for c in r] for r in raw], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric entry ({exc})") from exc
    if rows.ndim != 2 or rows.shape[1] < min_cols or len(rows) < 4:
        raise InputError(f"{path}: need at least 4 rows of {min_cols}+ columns")
    return rows


def _req(d: dict, key: str, kind: str):
    if key not in d:
        raise InputError(f"{kind} definition is missing {key!r}")
    return d[key]


def _num(x, name: str) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must be a number") from exc
    if not math.isfinite(v):
        raise InputError(f"{name} must be finite")
    return v


def _pair(x, name: str) -> tuple:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise InputError(f"{name} must be a pair of numbers")
    return (_num(x[0], name), _num(x[1], name))


def _resolve(path: str, base: Optional[Path]) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base is None else base / p


def curve_from_def(d: dict, base: Optional[Path] = None) -> ParamCurve:
    """Build a curve from {"kind": ..., parameters...}."""
    kind = _req(d, "kind", "curve")
    if kind not in CURVE_KINDS:
        raise InputError(f"unknown curve kind {kind!r}; expected one of {', '.join(CURVE_KINDS)}")
    if kind == "helix":
        dom = _pair(d.get("domain", [0.0, 2 * math.pi]), "domain")
        return curves.helix(_num(d.get("a", 1.0), "a"), _num(d.get("b", 1.0), "b"), dom)
    if kind == "circle":
        return curves.circle(_num(d.get("r", 1.0), "r"), _pair(d.get("center", [0, 0]), "center"), bool(d.get("clockwise", False)))
    if kind == "ellipse":
        return curves.ellipse(_num(d.get("a", 2.0), "a"), _num(d.get("b", 1.0), "b"), _pair(d.get("center", [0, 0]), "center"))
    if kind == "graph2d":
        f = Expr.parse(_req(d, "expr", "graph2d"), ("x",))
        return curves.graph2d(f, _pair(_req(d, "domain", "graph2d"), "domain"))
    if kind == "trig_poly":
        return curves.trig_poly(_req(d, "cos", "trig_poly"), _req(d, "sin", "trig_poly"), d.get("offset"))
    if kind == "samples":
        if "csv" in d:
            rows = read_csv_rows(_resolve(d["csv"], base), 3)
        else:
            rows = np.asarray(_req(d, "rows", "samples"), dtype=float)
        smoothing = d.get("smoothing")
        return curves.from_samples(rows, closed=bool(d.get("closed", False)), smoothing=None if smoothing is None else _num(smoothing, "smoothing"))
    if kind == "trefoil":
        return curves.trefoil()
    if kind == "figure_eight":
        return curves.figure_eight()
    if kind == "trochoid":
        return curves.trochoid(_num(_req(d, "a", "trochoid"), "a"))
    if kind == "limacon":
        return curves.limacon(_num(d.get("a", 1.0), "a"), _num(d.get("b", 0.8), "b"))
    return curves.segment(np.asarray(_req(d, "p", "segment"), float), np.asarray(_req(d, "q", "segment"), float))


def _generatrix(d: dict) -> ParamCurve:
    """Plane curve (x(s), y(s)) from two expressions in s: x is the height
    along the axis, y > 0 the distance to it."""
    xs = Expr.parse(_req(d, "x", "revolution"), ("s",))
    ys = Expr.parse(_req(d, "y", "revolution"), ("s",))
    dom = _pair(_req(d, "domain", "revolution"), "domain")
    jets = [(xs, ys)]
    for _ in range(3):
        jets.append((jets[-1][0].diff("s"), jets[-1][1].diff("s")))

    def lift(k):
        ex, ey = jets[k]
        return lambda s: curves._stack(ex(s) + 0 * np.asarray(s, float), ey(s) + 0 * np.asarray(s, float))

    return ParamCurve(lift(0), dom, d1=lift(1), d2=lift(2), d3=lift(3), name="generatrix")


def surface_from_def(d: dict) -> surfaces.Surface:
    """Build a surface from {"kind": ..., parameters...}."""
    kind = _req(d, "kind", "surface")
    if kind not in SURFACE_KINDS:
        raise InputError(f"unknown surface kind {kind!r}; expected one of {', '.join(SURFACE_KINDS)}")
    if kind == "sphere":
        return surfaces.sphere(_num(d.get("R", 1.0), "R"))
    if kind == "torus":
        return surfaces.torus(_num(d.get("R", 2.0), "R"), _num(d.get("r", 1.0), "r"))
    if kind == "graph":
        dom = d.get("domain", [[-2, 2], [-2, 2]])
        return surfaces.graph(Expr.parse(_req(d, "expr", "graph"), ("x", "y")), (_pair(dom[0], "domain"), _pair(dom[1], "domain")))
    if kind == "revolution":
        return surfaces.revolution(_generatrix(d))
    if kind == "saddle":
        return surfaces.saddle(_num(d.get("extent", 3.0), "extent"))
    if kind == "chart_expr":
        xyz = _req(d, "xyz", "chart_expr")
        if not isinstance(xyz, list) or len(xyz) != 3:
            raise InputError("chart_expr needs three expressions in 'xyz'")
        per = lambda k: None if d.get(k) is None else _num(d[k], k)
        return surfaces.chart_surface(
            xyz, _pair(_req(d, "udomain", "chart_expr"), "udomain"), _pair(_req(d, "vdomain", "chart_expr"), "vdomain"),
            per("uperiod"), per("vperiod"),
        )
    if kind == "plane":
        return surfaces.plane()
    if kind == "paraboloid":
        return surfaces.paraboloid(a=_num(d.get("a", 0.5), "a"))
    if kind == "cylinder":
        return surfaces.cylinder(_num(d.get("r", 1.0), "r"))
    if kind == "catenoid":
        return surfaces.catenoid()
    if kind == "pseudosphere":
        return surfaces.pseudosphere()
    return surfaces.smooth_cone(_num(d.get("slope", 0.5), "slope"), _num(d.get("eps", 0.3), "eps"))


def scalar_function(spec: Any, base: Optional[Path] = None, var: str = "s") -> Callable[[float], float]:
    """Curvature/torsion input: an expression string in ``var``, a number,
    or {"csv": path} with rows (s, value) interpolated by a cubic spline."""
    if isinstance(spec, (int, float)):
        c = float(spec)
        return lambda s: c
    if isinstance(spec, str):
        e = Expr.parse(spec, (var,))
        return lambda s: float(e(s))
    if isinstance(spec, dict) and "csv" in spec:
        rows = read_csv_rows(_resolve(spec["csv"], base), 2)
        sp = CubicSpline(rows[:, 0], rows[:, 1])
        return lambda s: float(sp(s))
    raise InputError("function must be a number, an expression string or {'csv': path}")


# ---------------------------------------------------------------------------
# writing


def _plain(obj):
    """Convert numpy containers and scalars into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def digest(obj) -> str:
    """sha256 of the canonical JSON of ``obj``."""
    return hashlib.sha256(json.dumps(_plain(obj), sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    """Deterministic JSON (sorted keys) written via temp file + rename."""
    _atomic_write(path, dumps(obj))


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(float(x)) for x in r))
    _atomic_write(path, "\n".join(lines) + "\n")
