"""LGL polynomials, GGL functions and their extremal properties.

phi_n(x) = P_{n+1}(x) - P_{n-1}(x) for n >= 1 (phi_0 = P_1) vanishes at
+-1 and has the LGL points as its zeros. The GGL functions generalise it
with a Gegenbauer parameter lambda and reduce to it at lambda = 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, DomainError, ParameterError
from .polycore import (
    NEWTON_MAXITER,
    NEWTON_TOL,
    NodeKind,
    NodeSet,
    _as_eval_array,
    gauss_legendre,
    gegenbauer_top,
    legendre_pair,
    log_gamma,
    log_gamma_ratio,
)

__all__ = [
    "GglParams",
    "EllipsePoint",
    "PhiMax",
    "EllipseMin",
    "phi_lgl",
    "phi_lgl_deriv",
    "legendre_zeros",
    "lgl_points",
    "phi_lgl_max",
    "phi_lgl_max_table",
    "psi_eval",
    "phi_ggl",
    "phi_ggl_deriv",
    "ggl_max_bound",
    "ggl_grid_max",
    "weighted_gegenbauer_max_bound",
    "durand_gegenbauer_bound",
    "phi_lgl_complex",
    "phi_lgl_ellipse_scaled",
    "ellipse_min_scan",
]

SQRT_PI = math.sqrt(math.pi)
LGL_MAX_LIMIT = 4.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GglParams:
    """Gegenbauer parameter lambda > -1/2, lambda != 0."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not lam > -0.5 or lam == 0.0:
            raise ParameterError(f"lambda must satisfy lambda > -1/2 and lambda != 0, got {lam}")
        object.__setattr__(self, "lam", lam)

    @property
    def is_lgl(self):
        return self.lam == 0.5


def _lam(params):
    return params.lam if isinstance(params, GglParams) else GglParams(params).lam


@dataclass(frozen=True)
class EllipsePoint:
    """Point z = (u + 1/u) / 2 with u = rho * exp(i theta).

    ``rho == 1`` (the interval traversed twice) is only accepted with
    ``degenerate=True``.
    """

    rho: float
    theta: float
    degenerate: bool = False

    def __post_init__(self):
        rho = float(self.rho)
        if rho < 1.0 or (rho == 1.0 and not self.degenerate):
            raise ParameterError(f"ellipse parameter must exceed 1, got {rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * math.pi))

    @property
    def u(self):
        return self.rho * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def z(self):
        u = self.u
        return 0.5 * (u + 1.0 / u)

    @property
    def semi_axes(self):
        return 0.5 * (self.rho + 1.0 / self.rho), 0.5 * (self.rho - 1.0 / self.rho)


@dataclass(frozen=True)
class PhiMax:
    value: float
    location: float
    bound_simple: float
    bound_sharp: float


@dataclass(frozen=True)
class EllipseMin:
    theta_star: float
    min_value: float
    endpoint_min: float
    log_min_value: float


def _check_degree(n, low=1):
    if int(n) != n or n < low:
        raise ValueError(f"degree must be an integer >= {low}, got {n}")
    return int(n)


def phi_lgl(n, x, strict=True):
    """phi_n(x) = P_{n+1}(x) - P_{n-1}(x) (phi_0 = x).

    Evaluated as (2n + 1) / (n + 1) * (x P_n - P_{n-1}), which vanishes
    exactly at x = +-1. ``strict=False`` admits complex or out-of-range x.
    """
    n = _check_degree(n, 0)
    xa = _as_eval_array(x, strict)
    if n == 0:
        return xa[()] if xa.ndim == 0 else xa.copy()
    pn, pnm1 = legendre_pair(n, xa, strict=False)
    return (2 * n + 1) / (n + 1) * (xa * pn - pnm1)


def phi_lgl_deriv(n, x, strict=True):
    """d/dx phi_n(x) = (2n + 1) P_n(x)."""
    n = _check_degree(n, 0)
    pn, _ = legendre_pair(n, x, strict=strict)
    return (2 * n + 1) * pn


def legendre_zeros(n):
    """The n zeros of P_n, ascending."""
    return gauss_legendre(_check_degree(n)).points


def lgl_points(n):
    """The n + 1 zeros of phi_n: -1, the zeros of P_n', and +1.

    Interior points come from Newton on P_n' started at midpoints of
    consecutive zeros of P_n (the two sets interlace). Weights are the LGL
    quadrature weights 2 / (n (n + 1) P_n(x_j)^2).
    """
    n = _check_degree(n)
    if n == 1:
        x = np.array([-1.0, 1.0])
    else:
        z = legendre_zeros(n)
        x = 0.5 * (z[:-1] + z[1:])
        nn1 = n * (n + 1)
        for _ in range(NEWTON_MAXITER):
            pn, pnm1 = legendre_pair(n, x)
            one_m = 1.0 - x * x
            dpn = n * (pnm1 - x * pn) / one_m
            d2pn = (2.0 * x * dpn - nn1 * pn) / one_m
            step = dpn / d2pn
            x = x - step
            if np.max(np.abs(step)) <= NEWTON_TOL:
                break
        else:
            resid = float(np.max(np.abs(step)))
            if resid > 1e-13:
                raise ConvergenceError(f"LGL Newton stalled for n={n}", resid)
        x = 0.5 * (x - x[::-1]) + 0.0
        x = np.concatenate([[-1.0], x, [1.0]])
    pn, _ = legendre_pair(n, x)
    w = 2.0 / (n * (n + 1) * pn * pn)
    return NodeSet(x, w, NodeKind.GAUSS_LOBATTO)


def _lgl_sharp_bound(n):
    if n % 2:
        log_r = log_gamma_ratio(n / 2.0, (n + 1) / 2.0)
        return (2 * n + 1) / SQRT_PI * math.exp(log_r) / (n + 1)
    log_r = log_gamma_ratio((n + 1) / 2.0, (n + 2) / 2.0)
    return (2 * n + 1) / SQRT_PI * math.exp(log_r) / math.sqrt(n * (n + 1.0))


def _central_zeros_even(ns):
    """Smallest positive zero of P_n for each even n in ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    theta = np.pi * (2 * ns - 1) / (4 * ns + 2)
    x = np.cos(theta) * (1.0 - (ns - 1) / (8.0 * ns.astype(float) ** 3))
    for _ in range(NEWTON_MAXITER):
        pn, pnm1 = legendre_pair(ns, x)
        dpn = ns * (pnm1 - x * pn) / (1.0 - x * x)
        step = pn / dpn
        x = x - step
        if np.max(np.abs(step)) <= NEWTON_TOL:
            break
    else:
        resid = float(np.max(np.abs(step)))
        if resid > 1e-13:
            raise ConvergenceError("central Legendre zero Newton stalled", resid)
    return x


def phi_lgl_max_table(ns):
    """Vectorised :func:`phi_lgl_max` over an array of degrees.

    Returns a dict of arrays keyed like the :class:`PhiMax` fields.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.ndim != 1 or np.any(ns < 1):
        raise ValueError("degrees must be a 1-d array of integers >= 1")
    loc = np.zeros(ns.shape)
    even = ns % 2 == 0
    if np.any(even):
        loc[even] = _central_zeros_even(ns[even])
    pn, pnm1 = legendre_pair(ns, loc)
    value = np.abs((2 * ns + 1) / (ns + 1) * (loc * pn - pnm1))
    simple = 4.0 / np.sqrt(2.0 * np.pi * ns)
    sharp = np.array([_lgl_sharp_bound(int(n)) for n in ns])
    return {"value": value, "location": loc, "bound_simple": simple, "bound_sharp": sharp}


def phi_lgl_max(n):
    """Maximum of |phi_n| on [-1, 1] and the two explicit bounds on it.

    The maximum sits at the zero of P_n closest to the origin (0 for odd n).
    ``bound_simple`` is 4 / sqrt(2 pi n); ``bound_sharp`` is the gamma-ratio
    value from which it is derived.
    """
    n = _check_degree(n)
    t = phi_lgl_max_table([n])
    return PhiMax(
        value=float(t["value"][0]),
        location=float(t["location"][0]),
        bound_simple=float(t["bound_simple"][0]),
        bound_sharp=float(t["bound_sharp"][0]),
    )


def psi_eval(n, x):
    """n (n + 1) / (2n + 1)^2 * phi_n(x)^2 + (1 - x^2) P_n(x)^2 on [0, 1].

    Its derivative is -2 x P_n(x)^2, so it decreases on [0, 1].
    """
    n = _check_degree(n)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("psi is defined on [0, 1]")
    pn, pnm1 = legendre_pair(n, xa)
    phi = (2 * n + 1) / (n + 1) * (xa * pn - pnm1)
    return n * (n + 1) / (2 * n + 1) ** 2 * phi * phi + (1.0 - xa * xa) * pn * pn


def phi_ggl(n, params, x, form=2, strict=True):
    """GGL function of degree n >= 1.

    ``form=2`` (default) evaluates
        -4 lam (n + lam) / (n (n + 2 lam)) * (1 - x^2)^(lam + 1/2) C_{n-1}^(lam+1)(x),
    which is finite on the closed interval. ``form=1`` evaluates the
    difference
        w_lam(x) [(n + 1)/(n + 2 lam) C_{n+1}^lam - (n + 2 lam - 1)/n C_{n-1}^lam]
    with w_lam = (1 - x^2)^(lam - 1/2); it is not finite at +-1 when
    lam < 1/2.
    """
    n = _check_degree(n)
    lam = _lam(params)
    xa = _as_eval_array(x, strict)
    one_m = 1.0 - xa * xa
    if form == 2:
        c = gegenbauer_top(n - 1, lam + 1.0, xa, strict=False)
        return -4.0 * lam * (n + lam) / (n * (n + 2.0 * lam)) * one_m ** (lam + 0.5) * c
    if form == 1:
        cp = gegenbauer_top(n + 1, lam, xa, strict=False)
        cm = gegenbauer_top(n - 1, lam, xa, strict=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = one_m ** (lam - 0.5)
            return w * ((n + 1) / (n + 2.0 * lam) * cp - (n + 2.0 * lam - 1.0) / n * cm)
    raise ValueError("form must be 1 or 2")


def phi_ggl_deriv(n, params, x):
    """d/dx phi_n^GGL(x) = 2 (n + lam) w_lam(x) C_n^lam(x).

    For lam < 1/2 the weight is singular at +-1, so x must be interior.
    """
    n = _check_degree(n)
    lam = _lam(params)
    xa = _as_eval_array(x, True)
    if lam < 0.5 and np.any(np.abs(xa) >= 1.0):
        raise DomainError("derivative is singular at +-1 for lambda < 1/2")
    c = gegenbauer_top(n, lam, xa)
    return 2.0 * (n + lam) * (1.0 - xa * xa) ** (lam - 0.5) * c


def ggl_max_bound(n, params):
    """Explicit bound B_n^lam on max |phi_n^GGL| for lam > 0."""
    n = _check_degree(n)
    lam = _lam(params)
    if lam <= 0:
        raise ParameterError("the explicit GGL maximum bound needs lambda > 0")
    lg_lam = log_gamma(lam)
    if n % 2:
        log_r = log_gamma_ratio((n + 1) / 2.0 + lam, (n + 1) / 2.0) - lg_lam
        return 4.0 * (n + lam) / (n * (n + 2.0 * lam)) * math.exp(log_r)
    log_r = log_gamma_ratio(n / 2.0 + lam, (n + 2) / 2.0) - lg_lam
    return 2.0 * (n + lam) / math.sqrt(n * (n + 2.0 * lam)) * math.exp(log_r)


def _chebyshev_grid(size):
    return np.cos(np.pi * np.arange(size - 1, -1, -1) / (size - 1))


def ggl_grid_max(n, params, grid=20001):
    """Max of |phi_n^GGL| over a Chebyshev-distributed grid (with x = 0).

    Returns ``(value, location)``. This is the only maximum estimate for
    lam < 0, where no closed-form bound exists.
    """
    x = _chebyshev_grid(grid)
    x[np.abs(x) < 1e-15] = 0.0
    v = np.abs(phi_ggl(n, params, x))
    j = int(np.argmax(v))
    return float(v[j]), float(x[j])


def weighted_gegenbauer_max_bound(n, lam):
    """Bound on max |w_lam C_n^lam| for lam >= 1.

    Even n: Gamma(n/2 + lam) / (Gamma(lam) Gamma(n/2 + 1)).
    Odd n: sqrt((n + 2 lam - 1)/(n + 1)) Gamma((n-1)/2 + lam) / (Gamma(lam) Gamma((n+1)/2)).
    """
    n = _check_degree(n, 0)
    if not lam >= 1.0:
        raise ParameterError("weighted Gegenbauer bound needs lambda >= 1")
    if n % 2 == 0:
        return durand_gegenbauer_bound(n, lam)
    log_r = log_gamma_ratio((n - 1) / 2.0 + lam, (n + 1) / 2.0) - log_gamma(lam)
    return math.sqrt((n + 2.0 * lam - 1.0) / (n + 1.0)) * math.exp(log_r)


def durand_gegenbauer_bound(n, lam):
    """Durand's bound Gamma(n/2 + lam) / (Gamma(lam) Gamma(n/2 + 1)), lam >= 1."""
    n = _check_degree(n, 0)
    if not lam >= 1.0:
        raise ParameterError("Durand's bound needs lambda >= 1")
    return math.exp(log_gamma_ratio(n / 2.0 + lam, n / 2.0 + 1.0) - log_gamma(lam))


def phi_lgl_complex(n, point):
    """phi_n at a complex point by the plain recurrence.

    ``point`` is an :class:`EllipsePoint` or a complex scalar/array. The
    values grow like rho**n; use :func:`phi_lgl_ellipse_scaled` when that
    could overflow.
    """
    n = _check_degree(n)
    z = point.z if isinstance(point, EllipsePoint) else np.asarray(point, dtype=complex)
    pn, pnm1 = legendre_pair(n, np.asarray(z, dtype=complex), strict=False)
    return (2 * n + 1) / (n + 1) * (z * pn - pnm1)


def phi_lgl_ellipse_scaled(n, rho, theta):
    """u**(-n) * phi_n(z) on the ellipse, with u = rho e^(i theta).

    Runs the recurrence on Q_k = P_k(z) u**(-k), which stays O(1) for any n,
    so |result| * rho**n is |phi_n(z)| without intermediate overflow.
    """
    n = _check_degree(n)
    th = np.asarray(theta, dtype=float)
    u = rho * np.exp(1j * th)
    z = 0.5 * (u + 1.0 / u)
    inv_u = 1.0 / u
    q_prev = np.zeros(th.shape, dtype=complex)
    q_cur = np.ones(th.shape, dtype=complex)
    for k in range(n):
        q_next = ((2 * k + 1) * z * q_cur - k * q_prev * inv_u) * inv_u / (k + 1)
        q_prev, q_cur = q_cur, q_next
    # phi_n u^-n = (2n+1)/(n+1) (z Q_n - Q_{n-1} / u)
    out = (2 * n + 1) / (n + 1) * (z * q_cur - q_prev * inv_u)
    return out[()] if out.ndim == 0 else out


def ellipse_min_scan(n, rho, grid_size=2048, xtol=1e-10):
    """Minimise |phi_n(z(theta))| over the Bernstein ellipse E_rho.

    A uniform theta grid locates the minimum, which is then refined by a
    bounded scalar minimisation over the neighbouring grid cells.
    """
    n = _check_degree(n)
    if not rho > 1.0:
        raise ParameterError(f"ellipse parameter must exceed 1, got {rho}")
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    h = 2.0 * math.pi / grid_size
    theta = h * np.arange(grid_size)
    vals = np.abs(phi_lgl_ellipse_scaled(n, rho, theta))
    j = int(np.argmin(vals))

    def objective(t):
        return abs(phi_lgl_ellipse_scaled(n, rho, t)) ** 2

    res = minimize_scalar(
        objective,
        bounds=(theta[j] - h, theta[j] + h),
        method="bounded",
        options={"xatol": xtol},
    )
    t_star = float(res.x)
    scaled = math.sqrt(res.fun)
    if scaled > vals[j]:
        t_star, scaled = float(theta[j]), float(vals[j])
    log_scale = n * math.log(rho)
    end0 = abs(phi_lgl_ellipse_scaled(n, rho, 0.0))
    end_pi = abs(phi_lgl_ellipse_scaled(n, rho, math.pi))
    if not math.isclose(end0, end_pi, rel_tol=1e-12):
        raise ArithmeticError("|phi_n| differs at theta = 0 and theta = pi")
    return EllipseMin(
        theta_star=t_star % (2.0 * math.pi),
        min_value=scaled * math.exp(log_scale) if log_scale < 700 else math.inf,
        endpoint_min=float(end0) * math.exp(log_scale) if log_scale < 700 else math.inf,
        log_min_value=math.log(scaled) + log_scale,
    )
