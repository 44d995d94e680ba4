"""Test-function registry, Legendre coefficients and projection errors."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError
from .polycore import gauss_legendre, legendre_all

__all__ = [
    "FunctionKind",
    "FunctionSpec",
    "LegendreSeries",
    "LinfError",
    "legendre_coeffs",
    "projection_eval",
    "l2_error",
    "l2_errors",
    "l2_error_direct",
    "linf_error",
    "total_variation",
    "reference_degree",
    "chebyshev_grid",
]

QUAD_TOL = 1e-13
MAX_ADAPTIVE_NODES = 1 << 14


class FunctionKind(str, Enum):
    ABS_SHIFT = "abs_shift"
    TRUNC_POW2 = "trunc_pow2"
    RUNGE = "runge"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FunctionSpec:
    """A test function on [-1, 1] with its registered smoothness data.

    Use the constructors :meth:`abs_shift`, :meth:`trunc_pow2`,
    :meth:`runge` and :meth:`custom` rather than building one directly.

    Attributes
    ----------
    m : int
        Highest derivative order that is of bounded variation.
    variations : tuple of float
        Total variations V_0, ..., V_m of f, f', ..., f^(m).
    theta : float or None
        Location of the single interior singularity.
    rho_max : float or None
        Largest Bernstein-ellipse parameter of analyticity (Runge only).
    """

    kind: FunctionKind
    m: int
    variations: tuple
    theta: Optional[float] = None
    a: Optional[float] = None
    rho_max: Optional[float] = None
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)
    derivative: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.theta is not None and not -1.0 < self.theta < 1.0:
            raise ParameterError(f"theta must lie in (-1, 1), got {self.theta}")
        if len(self.variations) != self.m + 1:
            raise ParameterError("variations must list V_0 .. V_m")

    @classmethod
    def abs_shift(cls, theta):
        """f(x) = |x - theta|; V_0 = V_1 = 2."""
        return cls(FunctionKind.ABS_SHIFT, m=1, variations=(2.0, 2.0), theta=float(theta))

    @classmethod
    def trunc_pow2(cls, theta):
        """f(x) = (x - theta)_+^2."""
        t = float(theta)
        return cls(
            FunctionKind.TRUNC_POW2,
            m=2,
            variations=((1.0 - t) ** 2, 2.0 * (1.0 - t), 2.0),
            theta=t,
        )

    @classmethod
    def runge(cls, a):
        """f(x) = 1 / (1 + (a x)^2), analytic inside E_rho for rho < (1 + sqrt(a^2 + 1)) / a."""
        a = float(a)
        if not a > 0:
            raise ParameterError("Runge parameter must be positive")
        return cls(
            FunctionKind.RUNGE,
            m=0,
            variations=(2.0 * a * a / (1.0 + a * a),),
            a=a,
            rho_max=(1.0 + math.sqrt(a * a + 1.0)) / a,
        )

    @classmethod
    def custom(cls, evaluator, m, variations, theta=None, derivative=None):
        """User-supplied function with declared smoothness data.

        Nothing about ``m`` or ``variations`` is checked against the
        evaluator.
        """
        return cls(
            FunctionKind.CUSTOM,
            m=int(m),
            variations=tuple(float(v) for v in variations),
            theta=None if theta is None else float(theta),
            evaluator=evaluator,
            derivative=derivative,
        )

    @property
    def poly_degree(self):
        """Degree of each polynomial piece, or None if not piecewise polynomial."""
        return {FunctionKind.ABS_SHIFT: 1, FunctionKind.TRUNC_POW2: 2}.get(self.kind)

    @property
    def breakpoints(self):
        if self.theta is None:
            return (-1.0, 1.0)
        return (-1.0, self.theta, 1.0)

    def __call__(self, x):
        x = np.asarray(x)
        if self.kind is FunctionKind.ABS_SHIFT:
            return np.abs(x - self.theta)
        if self.kind is FunctionKind.TRUNC_POW2:
            return np.where(x >= self.theta, (x - self.theta) ** 2, 0.0)
        if self.kind is FunctionKind.RUNGE:
            return 1.0 / (1.0 + (self.a * x) ** 2)
        return np.asarray(self.evaluator(x))

    def deriv(self, x):
        """First derivative (one-sided convention sign(0) = 0 at theta)."""
        x = np.asarray(x)
        if self.kind is FunctionKind.ABS_SHIFT:
            return np.sign(x - self.theta)
        if self.kind is FunctionKind.TRUNC_POW2:
            return np.where(x >= self.theta, 2.0 * (x - self.theta), 0.0)
        if self.kind is FunctionKind.RUNGE:
            a2 = self.a * self.a
            return -2.0 * a2 * x / (1.0 + a2 * x * x) ** 2
        if self.derivative is None:
            raise NotImplementedError("custom function has no derivative attached")
        return np.asarray(self.derivative(x))


@dataclass(frozen=True)
class LegendreSeries:
    """Coefficients a_0..a_N of the degree-N Legendre projection."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def truncate(self, n):
        return LegendreSeries(self.coeffs[: n + 1])

    def energy_terms(self):
        """a_k^2 / (k + 1/2), the squared L2 norm carried by each mode."""
        k = np.arange(self.coeffs.size)
        return self.coeffs**2 / (k + 0.5)

    def parseval_partial(self):
        return np.cumsum(self.energy_terms())

    def __call__(self, x):
        return projection_eval(self, x)


@dataclass(frozen=True)
class LinfError:
    value: float
    location: float


def _mapped_rule(lo, hi, q):
    rule = gauss_legendre(q)
    half = 0.5 * (hi - lo)
    return lo + half * (rule.points + 1.0), half * rule.weights


def _pieces(f):
    bp = f.breakpoints
    return list(zip(bp[:-1], bp[1:]))


def _integrate_pieces(f, integrand, exact_degree=None, q0=64, tol=QUAD_TOL, rtol=0.0):
    """Integrate ``integrand(x)`` (array-valued allowed) piecewise over f's pieces.

    With ``exact_degree`` each piece uses a Gauss rule exact for that
    degree. Otherwise the node count is doubled until successive results
    agree to ``max(tol, rtol * |result|)`` (max over components).
    """
    if exact_degree is not None:
        q = exact_degree // 2 + 1
        total = 0.0
        for lo, hi in _pieces(f):
            x, w = _mapped_rule(lo, hi, q)
            total = total + integrand(x) @ w
        return total
    q = q0
    prev = None
    change = math.inf
    while q <= MAX_ADAPTIVE_NODES:
        total = 0.0
        for lo, hi in _pieces(f):
            x, w = _mapped_rule(lo, hi, q)
            total = total + integrand(x) @ w
        if prev is not None:
            change = float(np.max(np.abs(np.asarray(total) - prev)))
            if change <= max(tol, rtol * float(np.max(np.abs(total)))):
                return total
        prev = np.asarray(total)
        q *= 2
    raise ConvergenceError(
        f"adaptive quadrature did not reach {tol:g} (achieved {change:.3g})", change
    )


def legendre_coeffs(f, N):
    """Legendre coefficients a_k = (k + 1/2) int f P_k, k = 0..N.

    Piecewise-polynomial kinds are integrated exactly on [-1, theta] and
    [theta, 1] with ceil((N + 3) / 2) + 2 Gauss nodes per piece. Other kinds
    use node doubling until the coefficient vector settles to 1e-13.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    scale = np.arange(N + 1) + 0.5

    def integrand(x):
        return legendre_all(N, x) * f(x)

    if f.poly_degree is not None:
        q = math.ceil((N + 3) / 2) + 2
        total = np.zeros(N + 1)
        for lo, hi in _pieces(f):
            x, w = _mapped_rule(lo, hi, q)
            total += integrand(x) @ w
    else:
        total = _integrate_pieces(f, integrand, q0=max(64, 2 * (N + 1)))
    return LegendreSeries(scale * total)


def projection_eval(s, x, strict=True):
    """f_N(x) = sum a_k P_k(x) in one upward recurrence sweep."""
    xa = np.asarray(x, dtype=float)
    if strict and np.any(np.abs(xa) > 1.0):
        raise DomainError("x must lie in [-1, 1]")
    c = s.coeffs
    p_prev = np.zeros(xa.shape)
    p_cur = np.ones(xa.shape)
    acc = c[0] * p_cur
    for k in range(1, c.size):
        p_next = ((2 * k - 1) * xa * p_cur - (k - 1) * p_prev) / k
        p_prev, p_cur = p_cur, p_next
        acc = acc + c[k] * p_cur
    return acc[()] if acc.ndim == 0 else acc


def reference_degree(n):
    """Reference truncation degree max(4n, n + 200) for tail sums."""
    return max(4 * n, n + 200)


def _norm_sq(f):
    if f.poly_degree is not None:
        return float(_integrate_pieces(f, lambda x: f(x) ** 2, exact_degree=2 * f.poly_degree))
    return float(_integrate_pieces(f, lambda x: f(x) ** 2))


def l2_errors(f, degrees, N_ref=None, correct_tail=True, series=None):
    """Vectorised :func:`l2_error` over several degrees sharing one series."""
    degrees = np.asarray(degrees, dtype=int)
    if N_ref is None:
        N_ref = reference_degree(int(degrees.max()))
    if np.any(4 * degrees > N_ref):
        raise ValueError("N_ref must be >= 4n")
    if series is None or series.degree < N_ref:
        series = legendre_coeffs(f, N_ref)
    terms = series.energy_terms()[: N_ref + 1]
    # suffix[k] = sum_{j >= k} terms[j]
    suffix = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
    tails = suffix[degrees + 1]
    if correct_tail:
        rest = _norm_sq(f) - suffix[0]
        noise = 64 * np.finfo(float).eps * suffix[0]
        if rest > noise:
            tails = tails + rest
    elif terms[-1] > 1e-15 * max(suffix[0], np.finfo(float).tiny):
        warnings.warn(
            f"Parseval tail not converged at N_ref={N_ref}: last term {terms[-1]:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.sqrt(tails)


def l2_error(f, n, N_ref=None, correct_tail=True, series=None):
    """||f - f_n||_2 from the Parseval tail sum_{k>n} a_k^2 / (k + 1/2).

    Terms are summed explicitly up to ``N_ref`` (default max(4n, n + 200)).
    With ``correct_tail`` the remainder beyond ``N_ref`` is added as
    ||f||^2 - sum_{k<=N_ref} a_k^2/(k + 1/2); without it the remainder is
    dropped and a RuntimeWarning flags an unconverged tail.
    """
    if N_ref is None:
        N_ref = reference_degree(n)
    if N_ref == n:
        return 0.0
    return float(l2_errors(f, [n], N_ref, correct_tail, series)[0])


def l2_error_direct(f, n, series=None):
    """||f - f_n||_2 by piecewise Gauss quadrature of (f - f_n)^2."""
    if series is None or series.degree < n:
        series = legendre_coeffs(f, n)
    fn = series.truncate(n)

    def integrand(x):
        return (f(x) - projection_eval(fn, x)) ** 2

    if f.poly_degree is not None:
        val = _integrate_pieces(f, integrand, exact_degree=2 * max(n, f.poly_degree) + 2)
    else:
        val = _integrate_pieces(f, integrand, q0=max(64, 2 * n), tol=1e-24, rtol=1e-10)
    return math.sqrt(max(float(val), 0.0))


def chebyshev_grid(size, extra=()):
    """Chebyshev-Lobatto points cos(j pi / (size - 1)), ascending, plus ``extra``."""
    x = -np.cos(np.pi * np.arange(size) / (size - 1))
    if len(extra):
        x = np.unique(np.concatenate([x, np.asarray(extra, dtype=float)]))
    return x


def linf_error(f, n, grid=10001, series=None):
    """max |f - f_n| on a Chebyshev-distributed grid.

    The grid also contains f's breakpoints. The argmax is polished by a
    3-point parabola through its neighbours when that increases the error.
    """
    if grid < 10001:
        raise ValueError("grid must have at least 10001 points")
    if series is None or series.degree < n:
        series = legendre_coeffs(f, n)
    fn = series.truncate(n)
    x = chebyshev_grid(grid, extra=f.breakpoints)
    err = np.abs(f(x) - projection_eval(fn, x))
    j = int(np.argmax(err))
    best_val, best_x = float(err[j]), float(x[j])
    if 0 < j < x.size - 1:
        x0, x1, x2 = x[j - 1 : j + 2]
        y0, y1, y2 = err[j - 1 : j + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
        if A < 0:
            xv = -B / (2 * A)
            if x0 < xv < x2:
                yv = float(abs(f(xv) - projection_eval(fn, xv)))
                if yv > best_val:
                    best_val, best_x = yv, float(xv)
    return LinfError(best_val, best_x)


def total_variation(f, order):
    """Registered total variation of the ``order``-th derivative of f."""
    if not 0 <= order <= f.m:
        raise ValueError(f"order {order} unsupported for kind {f.kind.value} (m = {f.m})")
    return f.variations[order]
