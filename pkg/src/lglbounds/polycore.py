"""Legendre and Gegenbauer evaluation kernels, Gauss-Legendre rules and
gamma-function ratios.

Every polynomial here is evaluated by its upward three-term recurrence.
Functions accept scalars or numpy arrays for ``x``; array input returns an
array whose leading axis runs over the degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError

__all__ = [
    "NodeKind",
    "NodeSet",
    "legendre_all",
    "legendre_pair",
    "legendre_deriv",
    "gegenbauer_all",
    "gegenbauer_top",
    "gauss_legendre",
    "log_gamma_ratio",
    "gamma_ratio",
    "log_gamma",
]

NEWTON_TOL = 1e-15
NEWTON_MAXITER = 20


class NodeKind(str, Enum):
    GAUSS = "gauss"
    GAUSS_LOBATTO = "gauss_lobatto"
    BARYCENTRIC = "barycentric"


@dataclass(frozen=True)
class NodeSet:
    """Nodes on [-1, 1] with their weights.

    ``weights`` are quadrature weights for the Gauss kinds and barycentric
    weights for ``kind == "barycentric"``.
    """

    points: np.ndarray
    weights: np.ndarray
    kind: NodeKind

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.shape != wts.shape:
            raise ValueError("points and weights must be 1-d of equal length")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if pts.size and (pts[0] < -1.0 or pts[-1] > 1.0):
            raise DomainError("points must lie in [-1, 1]")
        pts.flags.writeable = False
        wts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "kind", NodeKind(self.kind))

    def __len__(self):
        return self.points.size

    def integrate(self, values):
        """Quadrature sum of ``values`` sampled at the points."""
        return float(np.dot(self.weights, values))


def _as_eval_array(x, strict):
    arr = np.asarray(x)
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
        if strict and np.any(np.abs(arr) > 1.0):
            raise DomainError("x must lie in [-1, 1]")
    elif strict:
        raise DomainError("complex arguments require strict=False")
    return arr


def legendre_all(n, x, strict=True):
    """Values P_0(x), ..., P_n(x).

    Parameters
    ----------
    n : int
        Highest degree, ``n >= 0``.
    x : float, complex or ndarray
        Evaluation point(s). Points outside [-1, 1] (or complex points) are
        only accepted with ``strict=False``.

    Returns
    -------
    ndarray
        Shape ``(n + 1,) + np.shape(x)``.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xa = _as_eval_array(x, strict)
    out = np.empty((n + 1,) + xa.shape, dtype=np.result_type(xa, float))
    out[0] = 1.0
    if n >= 1:
        out[1] = xa
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * xa * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_pair(n, x, strict=True):
    """Return ``(P_n(x), P_{n-1}(x))`` without storing the full table.

    ``n`` may be an integer array broadcastable against ``x``; each entry
    then gets its own degree. ``P_{-1}`` is taken as 0.
    """
    xa = _as_eval_array(x, strict)
    na = np.asarray(n)
    if np.any(na < 0):
        raise ValueError("degree must be nonnegative")
    na, xa = np.broadcast_arrays(na, xa)
    dtype = np.result_type(xa, float)
    p_prev = np.zeros(xa.shape, dtype=dtype)
    p_cur = np.ones(xa.shape, dtype=dtype)
    res_n = np.where(na == 0, p_cur, 0).astype(dtype)
    res_nm1 = np.zeros(xa.shape, dtype=dtype)
    top = int(na.max()) if na.size else 0
    for k in range(top):
        p_next = ((2 * k + 1) * xa * p_cur - k * p_prev) / (k + 1)
        p_prev, p_cur = p_cur, p_next
        hit = na == k + 1
        if np.any(hit):
            res_n[hit] = p_cur[hit]
            res_nm1[hit] = p_prev[hit]
    if np.ndim(res_n) == 0:
        return res_n[()], res_nm1[()]
    return res_n, res_nm1


def legendre_deriv(n, x, strict=True):
    """Derivative P_n'(x).

    Uses P'_{k+1} = P'_{k-1} + (2k + 1) P_k, which stays exact at the
    endpoints where the (1 - x^2) form divides by zero.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xa = _as_eval_array(x, strict)
    dtype = np.result_type(xa, float)
    p_prev = np.zeros(xa.shape, dtype=dtype)
    p_cur = np.ones(xa.shape, dtype=dtype)
    d_prev = np.zeros(xa.shape, dtype=dtype)  # P'_{k-1}
    d_cur = np.zeros(xa.shape, dtype=dtype)  # P'_k
    for k in range(n):
        d_next = d_prev + (2 * k + 1) * p_cur
        p_next = ((2 * k + 1) * xa * p_cur - k * p_prev) / (k + 1)
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return d_cur[()] if d_cur.ndim == 0 else d_cur


def _check_lambda(lam):
    if not lam > -0.5 or lam == 0:
        raise ParameterError(f"lambda must satisfy lambda > -1/2 and lambda != 0, got {lam}")


def gegenbauer_all(n, lam, x, strict=True):
    """Values C_0^lam(x), ..., C_n^lam(x) by the three-term recurrence

    (k + 1) C_{k+1} = 2 (k + lam) x C_k - (k + 2 lam - 1) C_{k-1}.
    """
    _check_lambda(lam)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xa = _as_eval_array(x, strict)
    out = np.empty((n + 1,) + xa.shape, dtype=np.result_type(xa, float))
    out[0] = 1.0
    if n >= 1:
        out[1] = 2.0 * lam * xa
    for k in range(1, n):
        out[k + 1] = (2.0 * (k + lam) * xa * out[k] - (k + 2.0 * lam - 1.0) * out[k - 1]) / (k + 1)
    return out


def gegenbauer_top(n, lam, x, strict=True):
    """C_n^lam(x) alone, keeping only two recurrence rows in memory."""
    _check_lambda(lam)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xa = _as_eval_array(x, strict)
    dtype = np.result_type(xa, float)
    c_prev = np.zeros(xa.shape, dtype=dtype)
    c_cur = np.ones(xa.shape, dtype=dtype)
    for k in range(n):
        c_next = (2.0 * (k + lam) * xa * c_cur - (k + 2.0 * lam - 1.0) * c_prev) / (k + 1)
        c_prev, c_cur = c_cur, c_next
    return c_cur[()] if c_cur.ndim == 0 else c_cur


def _legendre_newton_values(n, x):
    """P_n(x) and P_n'(x) at interior points (vectorised)."""
    pn, pnm1 = legendre_pair(n, x)
    dpn = n * (pnm1 - x * pn) / (1.0 - x * x)
    return pn, dpn


def gauss_legendre(n):
    """Gauss-Legendre nodes and weights with ``n`` points.

    Newton iteration on P_n from the Tricomi approximation
    cos(pi (4k - 1) / (4n + 2)) of the k-th largest zero. Only the
    nonnegative half is iterated; the rest is mirrored so that the rule is
    exactly symmetric.
    """
    if n < 1:
        raise ValueError("node count must be >= 1")
    half = (n + 1) // 2
    k = np.arange(1, half + 1)
    theta = np.pi * (4 * k - 1) / (4 * n + 2)
    x = np.cos(theta) * (1.0 - (n - 1) / (8.0 * n**3))
    if n % 2 == 1:
        x[-1] = 0.0
    for _ in range(NEWTON_MAXITER):
        pn, dpn = _legendre_newton_values(n, x)
        step = pn / dpn
        x = x - step
        if np.max(np.abs(step)) <= NEWTON_TOL:
            break
    else:
        resid = float(np.max(np.abs(step)))
        if resid > 1e-13:
            raise ConvergenceError(f"Gauss-Legendre Newton stalled for n={n}", resid)
    if n % 2 == 1:
        x[-1] = 0.0
    _, dpn = _legendre_newton_values(n, x)
    w = 2.0 / ((1.0 - x * x) * dpn * dpn)
    # x is descending and nonnegative; assemble the symmetric rule.
    if n % 2 == 1:
        pts = np.concatenate([-x, x[-2::-1]])
        wts = np.concatenate([w, w[-2::-1]])
    else:
        pts = np.concatenate([-x, x[::-1]])
        wts = np.concatenate([w, w[::-1]])
    return NodeSet(pts + 0.0, wts, NodeKind.GAUSS)


# Stirling series coefficients B_{2k} / (2k (2k - 1)), k = 1..8.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_SHIFT = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_tail(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc * inv


def _stirling_tail_diff(a, b, h):
    """_stirling_tail(a) - _stirling_tail(b) without cancellation, h = a - b.

    Each power difference a^-p - b^-p is factored as
    (1/a - 1/b) * sum_i a^-i b^-(p-1-i) with 1/a - 1/b = -h / (a b).
    """
    d = -h / (a * b)
    ia, ib = 1.0 / a, 1.0 / b
    acc = 0.0
    for k, c in enumerate(_STIRLING):
        p = 2 * k + 1
        acc += c * math.fsum(ia**i * ib ** (p - 1 - i) for i in range(p))
    return d * acc


def _shift_up(x):
    """Return (x', s) with x' >= _SHIFT and ln Gamma(x) = ln Gamma(x') + s."""
    s = 0.0
    prod = 1.0
    while x < _SHIFT:
        prod *= x
        x += 1.0
        if prod > 1e250 or prod < 1e-250:
            s -= math.log(prod)
            prod = 1.0
    return x, s - math.log(prod)


def log_gamma(x):
    """ln Gamma(x) for x > 0 by the Stirling series after upward shifting."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    x, s = _shift_up(float(x))
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + _stirling_tail(x) + s


def log_gamma_ratio(a, b):
    """ln(Gamma(a) / Gamma(b)) for a, b > 0.

    Both arguments are shifted by the same integer count and the shift
    factors are accumulated as logs of (a + j) / (b + j), so the result keeps
    its relative accuracy when a and b are close (a = 10**6 + 1/2,
    b = 10**6, or two points near the minimum of Gamma).
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"log_gamma_ratio requires a, b > 0, got ({a}, {b})")
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    shift = max(0, math.ceil(_SHIFT - min(a, b)))
    h = a - b
    s = 0.0
    for j in range(shift):
        r = h / (b + j)
        s -= math.log1p(r) if abs(r) < 0.5 else math.log((a + j) / (b + j))
    a += shift
    b += shift
    main = (b - 0.5) * math.log1p(h / b) + h * math.log(a) - h
    # h is exact; the shifted a and b carry rounding, so factor h out.
    return main + _stirling_tail_diff(a, b, h) + s


def gamma_ratio(a, b):
    """Gamma(a) / Gamma(b) through :func:`log_gamma_ratio`."""
    return math.exp(log_gamma_ratio(a, b))
