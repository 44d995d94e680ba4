"""The acceptance checks, shared by the test suite and ``lglbounds verify-all``.

Each ``check_*`` function runs one criterion end to end and returns a
:class:`CheckResult`; nothing here raises on a failed criterion.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .coefficients import FunctionSpec, l2_error_direct, l2_errors, legendre_coeffs, linf_error
from .interp import barycentric_eval, barycentric_weights, diff_matrix, runge_diff_experiment, runge_interp_experiment
from .lobatto import (
    GglParams,
    durand_gegenbauer_bound,
    ellipse_min_scan,
    ggl_grid_max,
    ggl_max_bound,
    lgl_points,
    phi_ggl,
    phi_lgl,
    phi_lgl_max_table,
    weighted_gegenbauer_max_bound,
)
from .polycore import gauss_legendre

__all__ = ["CheckResult", "CHECKS", "run_all", "format_line"]

# Relative slack for "<=" comparisons whose two sides agree analytically
# (odd-degree maxima that equal their bound).
ROUND_SLACK = 1e-12
SEED = 20160801


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    parts: dict = field(default_factory=dict)
    seconds: float = 0.0


def _le(a, b, slack=ROUND_SLACK):
    return np.asarray(a) <= np.asarray(b) * (1.0 + slack)


def _result(number, name, parts, notes, t0):
    secs = time.perf_counter() - t0
    passed = all(parts.values())
    failed = [k for k, v in parts.items() if not v]
    detail = "; ".join(notes)
    if failed:
        detail = "failed: " + ", ".join(failed) + ("; " + detail if detail else "")
    return CheckResult(number, name, passed, detail, parts, secs)


def check_lgl_max(n_max=5000):
    """max |phi_n| <= 4/sqrt(2 pi n), scaled sequence increasing, near 1 at the end."""
    t0 = time.perf_counter()
    ns = np.arange(1, n_max + 1)
    t = phi_lgl_max_table(ns)
    scaled = t["value"] * np.sqrt(2.0 * np.pi * ns) / 4.0
    d = np.diff(scaled)
    drops = ns[1:][d <= 0]
    odd, even = scaled[0::2], scaled[1::2]
    parts = {
        "bound": bool(np.all(_le(t["value"], t["bound_simple"]))),
        "sharp_bound": bool(np.all(_le(t["value"], t["bound_sharp"]))),
        "strictly_increasing": drops.size == 0,
        "odd_increasing": bool(np.all(np.diff(odd) > 0)),
        "even_increasing": bool(np.all(np.diff(even) > 0)),
        "final_above_0.999": bool(scaled[-1] > 0.999),
    }
    secs = time.perf_counter() - t0
    parts["runtime_below_10s"] = secs < 10.0
    notes = [
        f"scaled[1]={scaled[0]:.6f} scaled[2]={scaled[1]:.6f} scaled[{n_max}]={scaled[-1]:.6f}",
        f"{drops.size} decreases (first at n={int(drops[0]) if drops.size else '-'})",
        f"{secs:.2f}s",
    ]
    return _result(1, "LGL maximum bound and scaled monotonicity", parts, notes, t0)


def check_coeff_bound(n_max=300):
    """|a_n| <= B_new for |x - theta| and (x - theta)_+^2; sharpness witness at theta = 0.3."""
    t0 = time.perf_counter()
    parts = {}
    worst = 0.0
    ratio_03 = 0.0
    for th in (0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9):
        a = np.abs(legendre_coeffs(FunctionSpec.abs_shift(th), n_max).coeffs)
        ns = np.arange(2, n_max + 1)
        bnd = np.array([B.coeff_bound_new(int(n), 1, 2.0) for n in ns])
        r = a[2:] / bnd
        worst = max(worst, float(r.max()))
        parts[f"abs_shift({th:g})"] = bool(np.all(a[2:] <= bnd))
        if th == 0.3:
            ratio_03 = float(r.max())
    parts["sharpness_theta_0.3"] = ratio_03 >= 0.2
    for th in (0.2, 0.4, 0.8):
        a = np.abs(legendre_coeffs(FunctionSpec.trunc_pow2(th), n_max).coeffs)
        ns = np.arange(3, n_max + 1)
        bnd = np.array([B.coeff_bound_new(int(n), 2, 2.0) for n in ns])
        worst = max(worst, float((a[3:] / bnd).max()))
        parts[f"trunc_pow2({th:g})"] = bool(np.all(a[3:] <= bnd))
    secs = time.perf_counter() - t0
    parts["runtime_below_30s"] = secs < 30.0
    notes = [f"max |a_n|/bound={worst:.4f}", f"theta=0.3 max ratio={ratio_03:.4f}", f"{secs:.2f}s"]
    return _result(2, "Legendre coefficient bound", parts, notes, t0)


def check_bound_comparisons():
    """New vs old coefficient bound, Xiang's gamma form, Liu's L2 form."""
    t0 = time.perf_counter()
    parts = {}
    ok = True
    for th in (0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9):
        vbar = B.abs_shift_seminorm(th)
        for n in range(2, 301):
            ok &= B.coeff_bound_new(n, 1, 2.0) <= B.coeff_bound_old(n, 1, vbar)
    parts["new<=old"] = bool(ok)
    xr = {m: B.coeff_bound_xiang(10**4, m, 2.0) / B.coeff_bound_new(10**4, m, 2.0) for m in (0, 1, 2)}
    parts["xiang/new in [0.99,1.01]"] = all(0.99 <= r <= 1.01 for r in xr.values())
    ok = True
    tail = {}
    for m in (0, 1, 2):
        r = [B.l2_error_bound_liu(n, m, 2.0) / B.l2_error_bound(n, m, 2.0) for n in range(m + 1, 101)]
        ok &= bool(np.all(_le(r, 1.0)))
        far = B.l2_error_bound_liu(10**4, m, 2.0) / B.l2_error_bound(10**4, m, 2.0)
        tail[m] = r[-1]
        # m = 0: the two bounds coincide, so the ratio is 1 up to rounding.
        rising = bool(np.all(np.diff(r) >= -ROUND_SLACK))
        parts[f"liu ratio tends to 1 (m={m})"] = rising and abs(1.0 - far) <= 1e-3
    parts["liu<=l2"] = bool(ok)
    notes = [
        "xiang/new=" + ",".join(f"{v:.6f}" for v in xr.values()),
        "liu/l2 at n=100=" + ",".join(f"{v:.6f}" for v in tail.values()),
    ]
    return _result(3, "bound comparisons", parts, notes, t0)


def check_l2_bound(n_max=200):
    """Measured L2 projection error below the bound; bound/error ratio <= 20 on [50, 200]."""
    t0 = time.perf_counter()
    parts = {}
    notes = []
    for f in (FunctionSpec.abs_shift(0.5), FunctionSpec.trunc_pow2(0.5)):
        m, V = f.m, 2.0
        ns = np.arange(m + 1, n_max + 1)
        err = l2_errors(f, ns)
        bnd = np.array([B.l2_error_bound(int(n), m, V) for n in ns])
        ratio = bnd / err
        big = ratio[ns >= 50]
        parts[f"{f.kind.value} error<bound"] = bool(np.all(err < bnd))
        parts[f"{f.kind.value} ratio<=20"] = bool(big.max() <= 20.0)
        notes.append(f"{f.kind.value}: ratio on [50,{n_max}] in [{big.min():.3f}, {big.max():.3f}]")
    secs = time.perf_counter() - t0
    parts["runtime_below_30s"] = secs < 30.0
    notes.append(f"{secs:.2f}s")
    return _result(4, "L2 projection error bound", parts, notes, t0)


def check_interior_linf(n_min=50, n_max=200, step=1):
    """Max-error location tends to tau; error below the interior bound; ratio <= 20."""
    t0 = time.perf_counter()
    parts = {}
    notes = []
    for f in (FunctionSpec.abs_shift(0.2), FunctionSpec.trunc_pow2(0.5)):
        tau = f.theta
        ns = list(range(n_min, n_max + 1, step))
        series = legendre_coeffs(f, n_max)
        errs, locs, bnds = [], [], []
        for n in ns:
            e = linf_error(f, n, series=series)
            errs.append(e.value)
            locs.append(e.location)
            bnds.append(B.interior_linf_bound(n, f.m, 2.0, tau))
        errs, locs, bnds = map(np.asarray, (errs, locs, bnds))
        off = np.abs(locs - tau)
        far = [n for n, d in zip(ns, off) if d > 0.01]
        name = f.kind.value
        parts[f"{name} location within 0.01"] = not far
        parts[f"{name} error<=bound"] = bool(np.all(errs <= bnds))
        parts[f"{name} ratio<=20"] = bool((bnds / errs).max() <= 20.0)
        notes.append(
            f"{name}: max |loc-tau|={off.max():.4f}"
            + (f" (n={far[0]}..{far[-1]} off by >0.01)" if far else "")
            + f", ratio in [{(bnds / errs).min():.3f}, {(bnds / errs).max():.3f}]"
        )
    return _result(5, "interior L-infinity bound", parts, notes, t0)


def check_bernstein_margin(samples=10**4, n_max=500, seed=SEED):
    """sqrt(2/pi)(n + 1/2)^(-1/2) - (1 - x^2)^(1/4)|P_n(x)| > 0 at random samples."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ns = rng.integers(0, n_max + 1, size=samples)
    xs = rng.uniform(-1.0, 1.0, size=samples)
    xs = xs[np.abs(xs) < 1.0]
    ns = ns[: xs.size]
    margin = B.bernstein_margin(ns, xs)
    parts = {"margin>0": bool(np.all(margin > 0))}
    j = int(np.argmin(margin))
    notes = [f"{xs.size} samples, min margin {margin[j]:.3e} at n={int(ns[j])}, x={xs[j]:.6f}"]
    return _result(6, "Bernstein-type margin", parts, notes, t0)


def check_ggl():
    """GGL reduces to LGL at lambda = 1/2; grid max below B_n^lambda; odd branch below Durand."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 7)
    xs = rng.uniform(-1.0, 1.0, size=100)
    half = GglParams(0.5)
    dev = max(float(np.max(np.abs(phi_ggl(n, half, xs) - phi_lgl(n, xs)))) for n in range(1, 31))
    parts = {"lambda=1/2 matches LGL": dev <= 1e-13}
    worst = 0.0
    ok = True
    for lam in (0.3, 1.0, 2.5):
        p = GglParams(lam)
        for n in range(1, 101):
            v, _ = ggl_grid_max(n, p, grid=4001)
            b = ggl_max_bound(n, p)
            worst = max(worst, v / b)
            ok &= bool(_le(v, b))
    parts["grid max<=bound"] = ok
    ok = True
    for lam in (1.0, 1.5, 2.0, 3.0):
        for n in range(1, 100, 2):
            ok &= bool(_le(weighted_gegenbauer_max_bound(n, lam), durand_gegenbauer_bound(n, lam)))
    parts["odd branch<=Durand"] = ok
    notes = [f"max |GGL-LGL|={dev:.2e}", f"max grid/bound={worst:.15f}"]
    return _result(7, "GGL functions", parts, notes, t0)


def phi1_ellipse_closed(rho, theta):
    s = rho * rho + rho**-2
    return 0.375 * (s - 2.0 * math.cos(2.0 * theta))


def phi2_ellipse_closed(rho, theta):
    s = rho * rho + rho**-2
    c = math.cos(2.0 * theta)
    return 5.0 / 16.0 * math.sqrt((s * s - 4.0 * c * c) * (s - 2.0 * c))


def check_ellipse_min():
    """Minimum of |phi_n| over E_rho sits at theta in {0, pi}; n = 1, 2 closed forms."""
    t0 = time.perf_counter()
    worst = 0.0
    closed_err = 0.0
    for rho in (1.05, 1.25, 1.5):
        for n in range(1, 21):
            r = ellipse_min_scan(n, rho)
            t = r.theta_star
            worst = max(worst, min(abs(t), abs(t - math.pi), abs(t - 2.0 * math.pi)))
            if n <= 2:
                ref = (phi1_ellipse_closed if n == 1 else phi2_ellipse_closed)(rho, 0.0)
                closed_err = max(closed_err, abs(r.min_value - ref) / ref)
    parts = {"theta_star in {0, pi}": worst <= 1e-6, "closed forms n=1,2": closed_err <= 1e-10}
    notes = [f"max distance to {{0, pi}}={worst:.2e}", f"closed-form rel err={closed_err:.2e}"]
    return _result(8, "ellipse minimum scan", parts, notes, t0)


def check_runge():
    """Interpolation rate within 2% and n^(3/2)-deflated differentiation rate within 3%."""
    t0 = time.perf_counter()
    parts = {}
    notes = []
    for a in (5.0, 6.0):
        ri = runge_interp_experiment(a)
        rd = runge_diff_experiment(a)
        parts[f"interp a={a:g}"] = ri.meta["rel_rate_error"] <= 0.02
        parts[f"diff a={a:g}"] = rd.meta["rel_rate_error"] <= 0.03
        notes.append(
            f"a={a:g}: rho={ri.meta['rho_predicted']:.7f} interp fit {ri.meta['rho_fitted']:.7f}, "
            f"diff fit {rd.meta['rho_fitted']:.7f}"
        )
    secs = time.perf_counter() - t0
    parts["runtime_below_20s"] = secs < 20.0
    notes.append(f"{secs:.2f}s")
    return _result(9, "Runge interpolation and differentiation rates", parts, notes, t0)


def check_infrastructure():
    """Gauss exactness, barycentric reproduction, D row sums and exactness, Parseval agreement."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 10)
    gauss = 0.0
    for n in range(1, 41):
        rule = gauss_legendre(n)
        for k in range(2 * n):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            gauss = max(gauss, abs(rule.integrate(rule.points**k) - exact))
    bary = 0.0
    xs = rng.uniform(-1.0, 1.0, size=200)
    for n in range(1, 51):
        c = rng.standard_normal(n + 1)
        b = barycentric_weights(lgl_points(n).points)
        vals = np.polynomial.legendre.legval(b.points, c)
        ref = np.polynomial.legendre.legval(xs, c)
        bary = max(bary, float(np.max(np.abs(barycentric_eval(b, vals, xs) - ref))))
    rows = 0.0
    dexact = 0.0
    for n in range(1, 41):
        b = barycentric_weights(lgl_points(n).points)
        d = diff_matrix(b)
        rows = max(rows, float(np.max(np.abs(d.entries.sum(axis=1)))))
        for k in range(1, n + 1):
            got = d @ b.points**k
            dexact = max(dexact, float(np.max(np.abs(got - k * b.points ** (k - 1)))))
    pars = 0.0
    for f in (FunctionSpec.abs_shift(0.5), FunctionSpec.trunc_pow2(0.5), FunctionSpec.abs_shift(-0.3)):
        ns = [10, 50, 100, 200]
        series = legendre_coeffs(f, max(ns))
        par = l2_errors(f, ns)
        for n, e in zip(ns, par):
            pars = max(pars, abs(e - l2_error_direct(f, n, series=series)))
    parts = {
        "gauss exactness": gauss <= 1e-13,
        "barycentric reproduction": bary <= 1e-11,
        "D row sums": rows <= 1e-12,
        "D exactness": dexact <= 1e-9,
        "parseval vs quadrature": pars <= 1e-8,
    }
    notes = [f"gauss {gauss:.1e}, bary {bary:.1e}, rows {rows:.1e}, D {dexact:.1e}, L2 {pars:.1e}"]
    return _result(10, "numerical infrastructure", parts, notes, t0)


CHECKS = (
    check_lgl_max,
    check_coeff_bound,
    check_bound_comparisons,
    check_l2_bound,
    check_interior_linf,
    check_bernstein_margin,
    check_ggl,
    check_ellipse_min,
    check_runge,
    check_infrastructure,
)


def format_line(r):
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name}: {r.detail}"


def run_all(stream=None):
    """Run every check, print one line each to ``stream``, return the results."""
    out = []
    for check in CHECKS:
        r = check()
        out.append(r)
        if stream is not None:
            print(format_line(r), file=stream, flush=True)
    return out
