"""Barycentric interpolation at LGL points, the spectral differentiation
matrix, and the Runge-function convergence experiments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundReport
from .coefficients import FunctionSpec, chebyshev_grid
from .errors import ConvergenceError, DomainError, ParameterError
from .lobatto import lgl_points

__all__ = [
    "BarycentricSet",
    "DiffMatrix",
    "barycentric_weights",
    "barycentric_eval",
    "diff_matrix",
    "fit_geometric_rate",
    "runge_interp_experiment",
    "runge_diff_experiment",
    "NODE_GUARD",
    "ERROR_FLOOR",
    "FIT_WINDOW",
    "DIFF_FLOOR_FACTOR",
]

NODE_GUARD = 1e-14
ERROR_FLOOR = 1e-13
FIT_WINDOW = 20
# Rounding plateau of D f grows like eps * n^2 (the norm of D).
DIFF_FLOOR_FACTOR = 10.0


@dataclass(frozen=True)
class BarycentricSet:
    """Interpolation points with barycentric weights scaled to max |w| = 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        wts = np.array(self.weights, dtype=float)
        if pts.ndim != 1 or pts.shape != wts.shape or pts.size < 2:
            raise ValueError("need at least two points with one weight each")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        pts.flags.writeable = False
        wts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def n(self):
        """Polynomial degree, one less than the number of points."""
        return self.points.size - 1

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class DiffMatrix:
    """Spectral differentiation matrix acting on values at the points."""

    entries: np.ndarray

    def __post_init__(self):
        d = np.array(self.entries, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("entries must be a square matrix")
        d.flags.writeable = False
        object.__setattr__(self, "entries", d)

    def __matmul__(self, values):
        return self.entries @ np.asarray(values, dtype=float)


def barycentric_weights(points):
    """Barycentric weights w_j = 1 / prod_{k != j} (x_j - x_k).

    Each factor is multiplied by 2 (the reciprocal capacity of [-1, 1]) so
    the products stay in floating-point range for large point counts; the
    common factor drops out when the weights are scaled to max |w| = 1.

    Parameters
    ----------
    points : array_like
        Sorted distinct points in [-1, 1], at least two.

    Returns
    -------
    BarycentricSet
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need at least two points")
    if np.any(np.abs(x) > 1.0):
        raise DomainError("points must lie in [-1, 1]")
    gaps = np.diff(x)
    if np.any(gaps == 0):
        raise ValueError("duplicate interpolation points")
    if np.any(gaps < 0):
        raise ValueError("points must be sorted ascending")
    diff = 2.0 * (x[:, None] - x[None, :])
    np.fill_diagonal(diff, 1.0)
    # Log-magnitude products avoid the over/underflow a running product hits
    # for thousands of points; the sign is tracked separately.
    logmag = np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.where(np.arange(x.size) % 2 == (x.size - 1) % 2, 1.0, -1.0)
    w = sign * np.exp(-(logmag - logmag.min()))
    w /= np.max(np.abs(w))
    return BarycentricSet(x, w)


def barycentric_eval(b, values, x):
    """Second-form barycentric interpolant of ``values`` at ``x``.

    Within ``NODE_GUARD`` of a node the node value is returned directly.
    """
    f = np.asarray(values, dtype=float)
    if f.shape != b.points.shape:
        raise ValueError("values must have one entry per point")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise DomainError("x must lie in [-1, 1]")
    flat = xa.reshape(-1)
    dx = flat[:, None] - b.points[None, :]
    near = np.abs(dx) < NODE_GUARD
    hit = near.any(axis=1)
    dx[near] = 1.0
    c = b.weights / dx
    out = (c @ f) / c.sum(axis=1)
    if np.any(hit):
        out[hit] = f[np.argmax(near[hit], axis=1)]
    out = out.reshape(xa.shape)
    return out[()] if out.ndim == 0 else out


def diff_matrix(b):
    """D_jk = (w_k / w_j) / (x_j - x_k) off the diagonal, D_jj = -sum_{k != j} D_jk."""
    x, w = b.points, b.weights
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return DiffMatrix(d)


def fit_geometric_rate(degrees, errors, floor=ERROR_FLOOR, window=FIT_WINDOW, power=0.0):
    """Fit errors ~ C n^power rho^-n by least squares on log error.

    Degrees are scanned in ascending order and the scan stops at the first
    error at or below ``floor`` (a scalar, or one value per degree); the
    last ``window`` admissible degrees are fitted.

    Returns
    -------
    rho : float
    log_c : float
        Intercept, so that the fitted line is exp(log_c) n^power rho^-n.
    used : ndarray
        Degrees that entered the fit.
    """
    n = np.asarray(degrees, dtype=float)
    e = np.asarray(errors, dtype=float)
    fl = np.broadcast_to(np.asarray(floor, dtype=float), n.shape)
    order = np.argsort(n)
    n, e, fl = n[order], e[order], fl[order]
    below = np.nonzero(~(e > fl))[0]
    stop = below[0] if below.size else n.size
    n, e = n[:stop], e[:stop]
    if n.size < 2:
        raise ConvergenceError("degenerate rate fit: fewer than two errors above the floor", float(n.size))
    n, e = n[-window:], e[-window:]
    y = np.log(e) - power * np.log(n)
    slope, log_c = np.polyfit(n, y, 1)
    return math.exp(-slope), float(log_c), n.astype(int)


def _check_degrees(degrees):
    degs = [int(d) for d in degrees]
    if not degs:
        raise ParameterError("degrees must be nonempty")
    if min(degs) < 1:
        raise ParameterError("degrees must be >= 1")
    return degs


def _fit_report(f, degs, errs, label, power, floor):
    rho, log_c, used = fit_geometric_rate(degs, errs, floor=floor, power=power)
    rho_pred = f.rho_max
    nn = np.asarray(degs, dtype=float)
    # Reference line at the predicted rate through the fitted window's centre.
    anchor = float(np.mean(used))
    log_anchor = log_c - anchor * math.log(rho)
    line = np.exp(log_anchor + power * np.log(nn) - (nn - anchor) * math.log(rho_pred))
    meta = {
        "a": f.a,
        "rho_predicted": rho_pred,
        "rho_fitted": rho,
        "rel_rate_error": abs(rho - rho_pred) / rho_pred,
        "fit_degrees": (int(used[0]), int(used[-1])),
    }
    return BoundReport(list(degs), [float(v) for v in errs], [float(v) for v in line], label, meta)


DEFAULT_DEGREES = tuple(range(2, 201, 2))


def runge_interp_experiment(a, degrees=DEFAULT_DEGREES, grid=10001):
    """Max interpolation error of 1/(1 + (a x)^2) at the LGL points.

    The error is measured on a Chebyshev-distributed grid. The returned
    report's ``bound`` column is the predicted geometric rate line anchored
    on the fitted window; ``meta`` holds the fitted and predicted rho.
    """
    f = FunctionSpec.runge(a)
    degs = _check_degrees(degrees)
    xs = chebyshev_grid(grid)
    fx = f(xs)
    errs = []
    for n in degs:
        b = barycentric_weights(lgl_points(n).points)
        p = barycentric_eval(b, f(b.points), xs)
        errs.append(float(np.max(np.abs(p - fx))))
    return _fit_report(f, degs, errs, f"runge interpolation a={a:g}", 0.0, ERROR_FLOOR)


def runge_diff_experiment(a, degrees=DEFAULT_DEGREES):
    """Max error of LGL spectral differentiation of the Runge function.

    The rate fit removes an n^(3/2) factor before the least-squares fit.
    """
    f = FunctionSpec.runge(a)
    degs = _check_degrees(degrees)
    errs = []
    for n in degs:
        b = barycentric_weights(lgl_points(n).points)
        d = diff_matrix(b)
        errs.append(float(np.max(np.abs(d @ f(b.points) - f.deriv(b.points)))))
    nn = np.asarray(degs, dtype=float)
    floor = np.maximum(ERROR_FLOOR, DIFF_FLOOR_FACTOR * np.finfo(float).eps * nn * nn)
    return _fit_report(f, degs, errs, f"runge differentiation a={a:g}", 1.5, floor)
