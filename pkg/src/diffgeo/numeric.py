"""Numerical kernels: finite differences, quadrature, adaptive ODE integration
and 2x2 symmetric eigenproblems.

Every routine takes an optional :class:`Tolerances`; the module-level
``DEFAULT_TOL`` is used otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as _spi

from .errors import DomainTooSmall, NotSymmetric, StepUnderflow, ToleranceNotMet


@dataclass(frozen=True)
class Tolerances:
    fd_step: float = 1e-5
    quad_abs_tol: float = 1e-12
    quad_rel_tol: float = 1e-12
    ode_abs_tol: float = 1e-11
    ode_rel_tol: float = 1e-11
    max_subdivisions: int = 500

    def __post_init__(self):
        for name in ("fd_step", "quad_abs_tol", "quad_rel_tol", "ode_abs_tol", "ode_rel_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 1e-8 <= self.fd_step <= 1e-2:
            raise ValueError("fd_step must lie in [1e-8, 1e-2]")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be a positive integer")

    def scaled(self, factor: float) -> "Tolerances":
        """Copy with quadrature and ODE targets multiplied by ``factor``."""
        return replace(
            self,
            quad_abs_tol=self.quad_abs_tol * factor,
            quad_rel_tol=self.quad_rel_tol * factor,
            ode_abs_tol=self.ode_abs_tol * factor,
            ode_rel_tol=self.ode_rel_tol * factor,
        )


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# finite differences

# 4th-order central stencils: offsets (in units of h), weights, denominator power
_STENCILS = {
    1: ((-2, -1, 1, 2), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
    2: ((-2, -1, 0, 1, 2), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    3: ((-3, -2, -1, 1, 2, 3), np.array([1.0, -8.0, 13.0, -13.0, 8.0, -1.0]) / 8.0),
}


def fd_step_for(t: float, order: int, tol: Tolerances = DEFAULT_TOL) -> float:
    # rounding error grows like eps / h**order, so higher orders need wider steps
    return tol.fd_step ** (1.0 / order) * (1.0 + abs(t))


def derivative(
    f: Callable,
    t: float,
    order: int = 1,
    tol: Tolerances = DEFAULT_TOL,
    domain: Optional[Sequence[float]] = None,
    analytic: Optional[Callable] = None,
):
    """Derivative of ``f`` at ``t`` of the given order (1, 2 or 3).

    If ``analytic`` is supplied it is returned directly. Otherwise a
    fourth-order central difference is used; when ``domain`` is given the
    stencil must stay inside it.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 1, 2 or 3")
    if analytic is not None:
        return analytic(t)
    offsets, weights = _STENCILS[order]
    h = fd_step_for(t, order, tol)
    if domain is not None:
        lo, hi = domain
        if t + offsets[0] * h < lo or t + offsets[-1] * h > hi:
            raise DomainTooSmall(f"stencil around t={t} leaves [{lo}, {hi}]")
    acc = None
    for k, w in zip(offsets, weights):
        term = w * np.asarray(f(t + k * h), dtype=float)
        acc = term if acc is None else acc + term
    acc = acc / h**order
    return float(acc) if np.ndim(acc) == 0 else acc


# ---------------------------------------------------------------------------
# quadrature


def integrate(f: Callable[[float], float], a: float, b: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Adaptive Gauss-Kronrod quadrature of a scalar function over [a, b]."""
    if a > b:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = _spi.quad(
            f,
            a,
            b,
            epsabs=tol.quad_abs_tol,
            epsrel=tol.quad_rel_tol,
            limit=int(tol.max_subdivisions),
            full_output=1,
        )
    value, err = out[0], out[1]
    if len(out) > 3:
        # QUADPACK flagged a problem; accept only if the error estimate is still usable
        target = max(tol.quad_abs_tol, tol.quad_rel_tol * abs(value))
        if not err <= 1e3 * target:
            raise ToleranceNotMet(f"quadrature on [{a}, {b}] stopped with error estimate {err:.3e}")
    return float(value)


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(a: float, b: float, panels: int, order: int = 8):
    """Nodes and weights of a composite Gauss-Legendre rule."""
    edges = np.linspace(a, b, panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def periodic_nodes(a: float, b: float, n: int):
    """Nodes and weights of the trapezoid rule for a periodic integrand."""
    nodes = a + (b - a) * np.arange(n) / n
    return nodes, np.full(n, (b - a) / n)


# ---------------------------------------------------------------------------
# ODE integration (Dormand-Prince 5(4))

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class ScalarPath:
    """Sampled solution of an ODE with cubic Hermite dense output."""

    def __init__(self, times, values, slopes=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if len(self.times) < 2 or len(self.times) != len(self.values):
            raise ValueError("a path needs at least two samples and matching lengths")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        self.slopes = None if slopes is None else np.asarray(slopes, dtype=float)

    def __len__(self):
        return len(self.times)

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def __call__(self, t: float) -> np.ndarray:
        ts = self.times
        if t <= ts[0]:
            return self.values[0].copy()
        if t >= ts[-1]:
            return self.values[-1].copy()
        i = int(np.searchsorted(ts, t)) - 1
        h = ts[i + 1] - ts[i]
        s = (t - ts[i]) / h
        y0, y1 = self.values[i], self.values[i + 1]
        if self.slopes is None:
            return (1 - s) * y0 + s * y1
        m0, m1 = self.slopes[i] * h, self.slopes[i + 1] * h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1


def ode_solve(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t1: float,
    tol: Tolerances = DEFAULT_TOL,
    project: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
    stop: Optional[Callable[[float, np.ndarray], bool]] = None,
    max_step: Optional[float] = None,
    first_step: Optional[float] = None,
    t_stops: Optional[Sequence[float]] = None,
) -> ScalarPath:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` with an embedded
    Dormand-Prince pair.

    ``project`` is applied to every accepted state (drift control), and
    integration ends early at the first accepted step where ``stop`` returns
    true. Steps are shortened to land exactly on each time in ``t_stops``.
    Raises :class:`StepUnderflow` when the step size collapses.
    """
    if not t1 > t0:
        raise ValueError("ode_solve integrates forward: t1 must exceed t0")
    shape = np.shape(y0)
    y = np.array(y0, dtype=float).ravel()

    def f(t, yy):
        return np.asarray(rhs(t, yy.reshape(shape)), dtype=float).ravel()

    atol, rtol = tol.ode_abs_tol, tol.ode_rel_tol
    span = t1 - t0
    hmax = span if max_step is None else min(max_step, span)
    t = t0
    k1 = f(t, y)
    if first_step is None:
        d0 = np.sqrt(np.mean((y / (atol + rtol * np.abs(y))) ** 2))
        d1 = np.sqrt(np.mean((k1 / (atol + rtol * np.abs(y))) ** 2))
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, hmax)
        y_probe = y + h * k1
        d2 = np.sqrt(np.mean(((f(t + h, y_probe) - k1) / (atol + rtol * np.abs(y))) ** 2)) / h
        scale = max(d1, d2)
        h1 = max(1e-6, h * 1e-3) if scale <= 1e-15 else (0.01 / scale) ** 0.2
        h = min(100 * h, h1, hmax)
    else:
        h = min(first_step, hmax)

    times, values, slopes = [t], [y.copy()], [k1.copy()]
    ks = [None] * 7
    stops = sorted(float(x) for x in (t_stops if t_stops is not None else ()) if t0 < x < t1)
    si = 0
    while t < t1:
        target = stops[si] if si < len(stops) else t1
        if t + h > target or target - (t + h) < 1e-12 * abs(span):
            h = target - t
        min_h = 16 * np.finfo(float).eps * max(1.0, abs(t))
        if h < min_h:
            raise StepUnderflow(f"step size underflow at t={t:.6g}")
        ks[0] = k1
        for i in range(1, 7):
            acc = y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    acc += (h * a) * ks[j]
            ks[i] = f(t + _C[i] * h, acc)
        y_new = acc  # stage 7 state equals the 5th-order solution (FSAL)
        err_vec = h * sum(e * k for e, k in zip(_E, ks) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            h *= 0.25
            continue
        if err <= 1.0:
            t = t + h if t + h < target else target
            while si < len(stops) and t >= stops[si]:
                si += 1
            k_new = ks[6]
            if project is not None:
                projected = np.asarray(project(t, y_new.reshape(shape)), dtype=float).ravel()
                if not np.array_equal(projected, y_new):
                    y_new = projected
                    k_new = f(t, y_new)
            y, k1 = y_new, k_new
            times.append(t)
            values.append(y.copy())
            slopes.append(k1.copy())
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(h * factor, hmax)
            if stop is not None and t < t1 and stop(t, y.reshape(shape)):
                break
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    vals = np.array(values).reshape((len(values),) + shape)
    slps = np.array(slopes).reshape((len(slopes),) + shape)
    return ScalarPath(times, vals, slps)


# ---------------------------------------------------------------------------
# 2x2 symmetric eigenproblem


def _orient(e: np.ndarray) -> np.ndarray:
    if e[0] < -1e-14 or (abs(e[0]) <= 1e-14 and e[1] < 0):
        return -e
    return e


def eig_sym2(m, sym_tol: float = 1e-8):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric 2x2 matrix.

    Eigenvectors are signed so that their first nonzero component is
    positive; a repeated eigenvalue returns the coordinate axes.
    """
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m))))
    if abs(m[0, 1] - m[1, 0]) > sym_tol * scale:
        raise NotSymmetric(f"asymmetry {abs(m[0, 1] - m[1, 0]):.3e} exceeds tolerance")
    a, b, d = m[0, 0], 0.5 * (m[0, 1] + m[1, 0]), m[1, 1]
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    lam1, lam2 = mean - radius, mean + radius
    if radius <= 1e-14 * scale:
        return (lam1, lam2), (np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    # pick the better-conditioned of the two candidate null vectors of m - lam1
    c1 = np.array([b, lam1 - a])
    c2 = np.array([lam1 - d, b])
    e1 = c1 if c1 @ c1 >= c2 @ c2 else c2
    e1 = _orient(e1 / np.linalg.norm(e1))
    e2 = _orient(np.array([-e1[1], e1[0]]))
    return (lam1, lam2), (e1, e2)
