"""Closed-form error bounds and Bernstein-ellipse geometry.

Each bound is a plain function of the degree and the smoothness data. The
functions refuse degrees below the threshold of the result they encode
(``ValidityError``) rather than returning a meaningless number.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .coefficients import FunctionKind
from .errors import DomainError, ParameterError, ValidityError
from .polycore import legendre_pair, log_gamma_ratio

__all__ = [
    "EllipseSpec",
    "BoundReport",
    "ellipse_geometry",
    "ellipse_length",
    "max_modulus",
    "analytic_coeff_bound",
    "analytic_linf_bound",
    "analytic_l2_bound",
    "coeff_bound_new",
    "coeff_bound_old",
    "abs_shift_seminorm",
    "coeff_bound_xiang",
    "l2_error_bound",
    "l2_error_bound_liu",
    "linf_error_bound",
    "weighted_linf_bound",
    "interior_linf_bound",
    "bernstein_margin",
    "lgl_interp_bound",
    "lgl_diff_bound",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class EllipseSpec:
    """Geometry of the Bernstein ellipse E_rho.

    ``max_modulus`` is M(rho) = max |f| on E_rho for whatever function the
    analytic bounds are applied to; it stays None for bare geometry.
    """

    rho: float
    semi_major: float
    semi_minor: float
    length: float
    dist: float
    max_modulus: Optional[float] = None

    @property
    def D(self):
        """2 M(rho) L(E_rho) / (pi sqrt(rho^2 - 1))."""
        if self.max_modulus is None:
            raise ValueError("max_modulus is not set on this EllipseSpec")
        return 2.0 * self.max_modulus * self.length / (math.pi * math.sqrt(self.rho**2 - 1.0))

    def with_max_modulus(self, M):
        return replace(self, max_modulus=float(M))


def ellipse_length(rho):
    """Perimeter of E_rho by adaptive quadrature of |dz/dtheta|."""
    a = 0.5 * (rho + 1.0 / rho)
    b = 0.5 * (rho - 1.0 / rho)

    def speed(t):
        return math.hypot(a * math.sin(t), b * math.cos(t))

    val, _ = quad(speed, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return 4.0 * val


def max_modulus(f, rho, grid=4096):
    """max |f(z)| over E_rho: theta scan plus bounded refinement."""
    if f.kind is not FunctionKind.RUNGE:
        raise NotImplementedError("max modulus is only registered for the Runge kind")
    a2 = f.a * f.a

    def modulus(t):
        u = rho * np.exp(1j * np.asarray(t))
        z = 0.5 * (u + 1.0 / u)
        return np.abs(1.0 / (1.0 + a2 * z * z))

    h = 2.0 * math.pi / grid
    theta = h * np.arange(grid)
    vals = modulus(theta)
    j = int(np.argmax(vals))
    res = minimize_scalar(
        lambda t: -float(modulus(t)),
        bounds=(theta[j] - h, theta[j] + h),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return max(float(vals[j]), -float(res.fun))


def ellipse_geometry(rho, f=None, M=None):
    """Build an :class:`EllipseSpec` for E_rho.

    Parameters
    ----------
    rho : float
        Ellipse parameter, > 1.
    f : FunctionSpec, optional
        If given, M(rho) is computed for it; rho must stay below its
        analyticity limit.
    M : float, optional
        Explicit M(rho), used when ``f`` is not given.
    """
    rho = float(rho)
    if not rho > 1.0:
        raise ParameterError(f"ellipse parameter must exceed 1, got {rho}")
    if f is not None:
        if f.rho_max is None:
            raise ParameterError(f"{f.kind.value} is not analytic on any Bernstein ellipse")
        if rho >= f.rho_max:
            raise ParameterError(f"rho={rho} reaches the singularity (rho_max={f.rho_max:.12g})")
        M = max_modulus(f, rho)
    a = 0.5 * (rho + 1.0 / rho)
    b = 0.5 * (rho - 1.0 / rho)
    return EllipseSpec(
        rho=rho,
        semi_major=a,
        semi_minor=b,
        length=ellipse_length(rho),
        dist=a - 1.0,
        max_modulus=None if M is None else float(M),
    )


def analytic_coeff_bound(k, e):
    """|a_k| <= D/2 for k = 0 and D sqrt(k) / rho^k for k >= 1."""
    if k < 0:
        raise ValidityError("degree must be >= 0")
    if k == 0:
        return 0.5 * e.D
    return e.D * math.sqrt(k) * e.rho ** (-k)


def analytic_linf_bound(n, e):
    """D rho^-n [(n+1)^(1/2) / (rho-1) + (n+1)^(-1/2) / (rho-1)^2]."""
    if n < 0:
        raise ValidityError("degree must be >= 0")
    r1 = e.rho - 1.0
    return e.D * e.rho ** (-n) * (math.sqrt(n + 1.0) / r1 + 1.0 / (math.sqrt(n + 1.0) * r1 * r1))


def analytic_l2_bound(n, e):
    """D / (rho^n sqrt(rho^2 - 1))."""
    if n < 0:
        raise ValidityError("degree must be >= 0")
    return e.D * e.rho ** (-n) / math.sqrt(e.rho**2 - 1.0)


def _inv_shifted_product(n, m, start=1):
    """prod_{k=start}^{m} 1 / (n - k + 1/2), in log space for n > 1000."""
    ks = range(start, m + 1)
    if n > 1000:
        return math.exp(-math.fsum(math.log(n - k + 0.5) for k in ks))
    out = 1.0
    for k in ks:
        out /= n - k + 0.5
    return out


def _need(n, m, low):
    if m < 0 or int(m) != m:
        raise ValidityError("smoothness order m must be a nonnegative integer")
    if n < low:
        raise ValidityError(f"bound requires n >= {low} (got n={n}, m={m})")


def coeff_bound_new(n, m, V):
    """|a_n| <= 2V / sqrt(2 pi (n - m)) * prod_{k=1}^m 1/(n - k + 1/2), n >= m + 1."""
    _need(n, m, m + 1)
    return 2.0 * V / math.sqrt(2.0 * math.pi * (n - m)) * _inv_shifted_product(n, m)


def coeff_bound_old(n, m, V_bar):
    """Earlier bound with the weighted semi-norm V_bar in place of V_m."""
    _need(n, m, m + 1)
    return 2.0 * V_bar / math.sqrt(math.pi * (2 * n - 2 * m - 1)) * _inv_shifted_product(n, m)


def abs_shift_seminorm(theta):
    """int (1 - x^2)^(-1/4) |f''| for f = |x - theta|, i.e. 2 (1 - theta^2)^(-1/4)."""
    if not -1.0 < theta < 1.0:
        raise DomainError("theta must lie in (-1, 1)")
    return 2.0 * (1.0 - theta * theta) ** -0.25


def coeff_bound_xiang(n, m, V):
    """V / (2^m sqrt pi) (n + 1/2) Gamma((n-m)/2) / ((n + m + 1) Gamma((n+m+1)/2))."""
    _need(n, m, m + 1)
    log_r = log_gamma_ratio((n - m) / 2.0, (n + m + 1) / 2.0)
    return V / (2.0**m * math.sqrt(math.pi)) * (n + 0.5) / (n + m + 1.0) * math.exp(log_r)


def l2_error_bound(n, m, V):
    """||f - f_n||_2 <= V / (sqrt(pi (m + 1/2)) (n - m)^(m + 1/2)), n >= m + 1."""
    _need(n, m, m + 1)
    return V / (math.sqrt(math.pi * (m + 0.5)) * (n - m) ** (m + 0.5))


def l2_error_bound_liu(n, m, V):
    """V / sqrt(pi (m + 1/2)) * sqrt(Gamma(n - m) / Gamma(n + m + 1))."""
    _need(n, m, m + 1)
    return V / math.sqrt(math.pi * (m + 0.5)) * math.exp(0.5 * log_gamma_ratio(n - m, n + m + 1))


def linf_error_bound(n, m, V):
    """Uniform bound from |P_k| <= 1; m = 1 gives 4V / sqrt(2 pi (n - 1))."""
    if m < 1:
        raise ValidityError("the uniform bound needs m >= 1")
    _need(n, m, m + 1)
    if m == 1:
        return 4.0 * V / math.sqrt(2.0 * math.pi * (n - 1))
    return (2.0 * V / (m - 1)) / math.sqrt(2.0 * math.pi * (n + 1 - m)) * _inv_shifted_product(n, m - 1)


def weighted_linf_bound(n, m, V):
    """max (1 - x^2)^(1/4) |f - f_n| <= 2V / (m pi) prod_{j=1}^m 1/(n - j + 1/2), n >= m."""
    if m < 1:
        raise ValidityError("the weighted bound needs m >= 1")
    _need(n, m, m)
    return 2.0 * V / (m * math.pi) * _inv_shifted_product(n, m)


def interior_linf_bound(n, m, V, tau):
    """Uniform bound when the maximum error sits at an interior point tau."""
    if not -1.0 < tau < 1.0:
        raise DomainError("tau must lie in (-1, 1)")
    return weighted_linf_bound(n, m, V) / (1.0 - tau * tau) ** 0.25


def bernstein_margin(n, x):
    """sqrt(2/pi) (n + 1/2)^(-1/2) - (1 - x^2)^(1/4) |P_n(x)|; positive on (-1, 1)."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) >= 1.0):
        raise DomainError("x must lie in (-1, 1)")
    pn, _ = legendre_pair(n, xa)
    return math.sqrt(2.0 / math.pi) / np.sqrt(np.asarray(n) + 0.5) - (1.0 - xa * xa) ** 0.25 * np.abs(pn)


def _analytic_prefactor(e, K):
    return K * math.sqrt(2.0) * e.max_modulus * e.length / e.dist


def lgl_interp_bound(n, e, K=1.0):
    """K sqrt2 M L / (d pi sqrt(rho^2 - 1)) rho^-n for LGL interpolation."""
    if n < 1:
        raise ValidityError("degree must be >= 1")
    return _analytic_prefactor(e, K) / (math.pi * math.sqrt(e.rho**2 - 1.0)) * e.rho ** (-n)


def lgl_diff_bound(n, e, K=1.0):
    """K sqrt2 M L / (d sqrt(pi (rho^2 - 1))) n^(3/2) rho^-n at the LGL points."""
    if n < 1:
        raise ValidityError("degree must be >= 1")
    return _analytic_prefactor(e, K) / math.sqrt(math.pi * (e.rho**2 - 1.0)) * n**1.5 * e.rho ** (-n)


@dataclass
class BoundReport:
    """Measured quantities against a bound, one row per degree."""

    degrees: list
    measured: list
    bound: list
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not len(self.degrees) == len(self.measured) == len(self.bound):
            raise ValueError("degrees, measured and bound must have equal length")

    @property
    def ratio(self):
        return [b / m if m != 0 else math.inf for b, m in zip(self.bound, self.measured)]

    def violations(self):
        """Degrees where the measured value exceeds the bound."""
        return [n for n, m, b in zip(self.degrees, self.measured, self.bound) if m > b]

    def to_csv(self, fh=None):
        """Write ``n,measured,bound,ratio`` rows with %.17g; returns the text if fh is None."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "measured", "bound", "ratio"])
        for n, m, b, r in zip(self.degrees, self.measured, self.bound, self.ratio):
            w.writerow([int(n), "%.17g" % m, "%.17g" % b, "%.17g" % r])
        if fh is None:
            return out.getvalue()
        return None
