"""Command-line front end: each subcommand writes one or more CSV files.

Files go to ``--out`` if given, else to ``$LGLBOUNDS_OUT_DIR``, else to the
current directory. Exit status is 2 for configuration errors, 3 when a
numerical iteration fails to converge, 1 when ``verify-all`` finds a failed
criterion and 0 otherwise.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as B
from .coefficients import FunctionSpec, chebyshev_grid, l2_errors, legendre_coeffs, linf_error
from .errors import ConvergenceError, DomainError, ParameterError, ValidityError
from .interp import runge_diff_experiment, runge_interp_experiment
from .lobatto import GglParams, ellipse_min_scan, ggl_grid_max, ggl_max_bound, phi_lgl, phi_lgl_max, phi_lgl_max_table

OUT_ENV = "LGLBOUNDS_OUT_DIR"
EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

COMMANDS = (
    "phi-max",
    "phi-scaled",
    "coeff-bounds",
    "l2-bounds",
    "linf-bounds",
    "ggl-max",
    "ellipse-min",
    "interp-runge",
    "diff-runge",
    "verify-all",
)

# Default figure parameters.
COEFF_THETAS = {"abs_shift": (0.3, 0.6, 0.9), "trunc_pow2": (0.2, 0.4, 0.8)}
RUNGE_A = (5.0, 6.0)
GGL_LAMBDAS = (0.3, 1.0, 2.5)
ELLIPSE_CASES = ((3, 1.05), (3, 1.25), (3, 1.5), (8, 1.05), (8, 1.25), (8, 1.32))

# Flags accepted by each command; anything else is a config error.
ALLOWED = {
    "phi-max": {"n_min", "n_max"},
    "phi-scaled": {"n", "grid"},
    "coeff-bounds": {"kind", "theta", "n_max"},
    "l2-bounds": {"theta", "n_max"},
    "linf-bounds": {"n_min", "n_max", "grid"},
    "ggl-max": {"lam", "n_min", "n_max", "grid"},
    "ellipse-min": {"n", "rho", "grid"},
    "interp-runge": {"a", "n_min", "n_max", "grid"},
    "diff-runge": {"a", "n_min", "n_max"},
    "verify-all": set(),
}


class ConfigError(ValueError):
    """Invalid command-line configuration."""


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out_dir: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        extra = set(self.params) - ALLOWED[self.command]
        if extra:
            raise ConfigError(f"{self.command} does not accept: {', '.join(sorted(extra))}")

    def get(self, key, default):
        v = self.params.get(key)
        return default if v is None else v

    def output_dir(self):
        if self.out_dir is not None:
            return Path(self.out_dir)
        env = os.environ.get(OUT_ENV)
        return Path(env) if env else Path.cwd()


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def write_rows(path, header, rows):
    """Write a CSV with LF line endings and %.17g floats."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_report(path, report):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        report.to_csv(fh)
    return path


def _tag(v):
    return ("%g" % v).replace("-", "m")


def _range(cfg, lo, hi, floor):
    n_min = int(cfg.get("n_min", lo))
    n_max = int(cfg.get("n_max", hi))
    if n_min < floor:
        raise ConfigError(f"--n-min must be >= {floor}")
    if n_max < n_min:
        raise ConfigError("--n-max must be >= --n-min")
    return n_min, n_max


def _grid(cfg, default, low=3):
    g = int(cfg.get("grid", default))
    if g < low:
        raise ConfigError(f"--grid must be >= {low}")
    return g


def _thetas(cfg, default):
    ths = tuple(cfg.get("theta", default))
    for t in ths:
        if not -1.0 < t < 1.0:
            raise ConfigError(f"theta must lie in (-1, 1), got {t}")
    return ths


def cmd_phi_max(cfg, out):
    n_min, n_max = _range(cfg, 1, 5000, 1)
    ns = np.arange(n_min, n_max + 1)
    t = phi_lgl_max_table(ns)
    scaled = t["value"] * np.sqrt(2.0 * np.pi * ns) / 4.0
    rows = zip(ns, t["value"], t["location"], t["bound_simple"], t["bound_sharp"], scaled)
    return [write_rows(out / "phi-max.csv", ["n", "value", "location", "bound_simple", "bound_sharp", "scaled"], rows)]


def cmd_phi_scaled(cfg, out):
    ns = cfg.get("n", [2000])
    grid = _grid(cfg, 20001)
    for n in ns:
        if n < 1:
            raise ConfigError("--n must be >= 1")
    files = []
    for n in ns:
        loc = phi_lgl_max(n).location
        x = np.unique(np.concatenate([chebyshev_grid(grid), [-loc, loc]]))
        s = np.abs(phi_lgl(n, x)) * math.sqrt(2.0 * math.pi * n) / 4.0
        files.append(write_rows(out / f"phi-scaled_n{n}.csv", ["x", "scaled"], zip(x, s)))
    return files


def cmd_coeff_bounds(cfg, out):
    kind = cfg.get("kind", "abs_shift")
    if kind not in COEFF_THETAS:
        raise ConfigError(f"--kind must be one of {', '.join(COEFF_THETAS)}")
    ths = _thetas(cfg, COEFF_THETAS[kind])
    n_max = int(cfg.get("n_max", 300))
    make = getattr(FunctionSpec, kind)
    m = make(0.0).m
    if n_max < m + 1:
        raise ConfigError(f"--n-max must be >= {m + 1}")
    files = []
    for th in ths:
        f = make(th)
        a = np.abs(legendre_coeffs(f, n_max).coeffs)
        ns = list(range(m + 1, n_max + 1))
        rep = B.BoundReport(ns, [float(a[n]) for n in ns], [B.coeff_bound_new(n, m, 2.0) for n in ns], f"{kind} {th:g}")
        files.append(write_report(out / f"coeff-bounds_{kind}_theta{_tag(th)}.csv", rep))
    return files


def cmd_l2_bounds(cfg, out):
    ths = _thetas(cfg, (0.5,))
    n_max = int(cfg.get("n_max", 200))
    if n_max < 3:
        raise ConfigError("--n-max must be >= 3")
    files = []
    for th in ths:
        for f in (FunctionSpec.abs_shift(th), FunctionSpec.trunc_pow2(th)):
            ns = list(range(f.m + 1, n_max + 1))
            err = l2_errors(f, ns)
            rep = B.BoundReport(ns, [float(e) for e in err], [B.l2_error_bound(n, f.m, 2.0) for n in ns])
            files.append(write_report(out / f"l2-bounds_{f.kind.value}_theta{_tag(th)}.csv", rep))
    return files


def cmd_linf_bounds(cfg, out):
    n_min, n_max = _range(cfg, 3, 200, 3)
    grid = _grid(cfg, 10001, low=10001)
    files = []
    for f in (FunctionSpec.abs_shift(0.2), FunctionSpec.trunc_pow2(0.5)):
        series = legendre_coeffs(f, n_max)
        rows = []
        for n in range(n_min, n_max + 1):
            e = linf_error(f, n, grid=grid, series=series)
            b = B.interior_linf_bound(n, f.m, 2.0, f.theta)
            rows.append((n, e.value, b, b / e.value, e.location))
        name = f"linf-bounds_{f.kind.value}_tau{_tag(f.theta)}.csv"
        files.append(write_rows(out / name, ["n", "measured", "bound", "ratio", "location"], rows))
    return files


def cmd_ggl_max(cfg, out):
    lams = tuple(cfg.get("lam", GGL_LAMBDAS))
    n_min, n_max = _range(cfg, 1, 100, 1)
    grid = _grid(cfg, 4001)
    params = [GglParams(lam) for lam in lams]
    files = []
    for p in params:
        rows = []
        for n in range(n_min, n_max + 1):
            v, x = ggl_grid_max(n, p, grid=grid)
            b = ggl_max_bound(n, p) if p.lam > 0 else math.nan
            rows.append((n, v, b, b / v, x))
        name = f"ggl-max_lambda{_tag(p.lam)}.csv"
        files.append(write_rows(out / name, ["n", "measured", "bound", "ratio", "location"], rows))
    return files


def cmd_ellipse_min(cfg, out):
    ns, rhos = cfg.get("n", None), cfg.get("rho", None)
    if ns is None and rhos is None:
        cases = list(ELLIPSE_CASES)
    else:
        cases = [(n, r) for n in (ns or [3, 8]) for r in (rhos or [1.05, 1.25, 1.5])]
    grid = _grid(cfg, 2048, low=64)
    for n, r in cases:
        if n < 1:
            raise ConfigError("--n must be >= 1")
        if not r > 1.0:
            raise ConfigError("--rho must exceed 1")
    rows = []
    for n, r in cases:
        res = ellipse_min_scan(n, r, grid_size=grid)
        rows.append((n, r, res.theta_star, res.min_value, res.endpoint_min, res.log_min_value))
    header = ["n", "rho", "theta_star", "min_value", "endpoint_min", "log_min_value"]
    return [write_rows(out / "ellipse-min.csv", header, rows)]


def _runge(cfg, out, experiment, stem, **kw):
    a_vals = tuple(cfg.get("a", RUNGE_A))
    for a in a_vals:
        if not a > 0:
            raise ConfigError("--a must be positive")
    n_min, n_max = _range(cfg, 2, 200, 1)
    degrees = range(n_min, n_max + 1, 2) if "n_min" not in cfg.params else range(n_min, n_max + 1)
    files = []
    for a in a_vals:
        rep = experiment(a, degrees, **kw)
        files.append(write_report(out / f"{stem}_a{_tag(a)}.csv", rep))
        m = rep.meta
        print(f"a={a:g}: fitted rho {m['rho_fitted']:.7f}, predicted {m['rho_predicted']:.7f}")
    return files


def cmd_interp_runge(cfg, out):
    return _runge(cfg, out, runge_interp_experiment, "interp-runge", grid=_grid(cfg, 10001))


def cmd_diff_runge(cfg, out):
    return _runge(cfg, out, runge_diff_experiment, "diff-runge")


def cmd_verify_all(cfg, out):
    from .verify import run_all

    results = run_all(sys.stdout)
    rows = [(r.number, r.name, "pass" if r.passed else "fail", r.detail) for r in results]
    path = out / "verify-all.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["criterion", "name", "status", "detail"])
        w.writerows(rows)
    return [path], all(r.passed for r in results)


HANDLERS = {
    "phi-max": cmd_phi_max,
    "phi-scaled": cmd_phi_scaled,
    "coeff-bounds": cmd_coeff_bounds,
    "l2-bounds": cmd_l2_bounds,
    "linf-bounds": cmd_linf_bounds,
    "ggl-max": cmd_ggl_max,
    "ellipse-min": cmd_ellipse_min,
    "interp-runge": cmd_interp_runge,
    "diff-runge": cmd_diff_runge,
    "verify-all": cmd_verify_all,
}


def run(config):
    """Execute a :class:`RunConfig`; returns ``(exit_status, files)``."""
    out = config.output_dir()
    try:
        res = HANDLERS[config.command](config, out)
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE, []
    except (ConfigError, ParameterError, DomainError, ValidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, []
    if isinstance(res, tuple):
        files, ok = res
        return (EXIT_OK if ok else EXIT_FAILED_CHECK), files
    return EXIT_OK, res


def build_parser():
    p = argparse.ArgumentParser(prog="lglbounds", description="Reproduce LGL and Legendre bound experiments as CSV.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    flags = {
        "n": dict(type=int, nargs="+", help="degree(s)"),
        "n_min": dict(type=int, help="smallest degree"),
        "n_max": dict(type=int, help="largest degree"),
        "theta": dict(type=float, nargs="+", help="singularity location(s) in (-1, 1)"),
        "a": dict(type=float, nargs="+", help="Runge parameter(s)"),
        "lam": dict(type=float, nargs="+", help="Gegenbauer parameter(s)"),
        "rho": dict(type=float, nargs="+", help="ellipse parameter(s) > 1"),
        "grid": dict(type=int, help="evaluation grid size"),
        "kind": dict(choices=sorted(COEFF_THETAS), help="test function"),
    }
    names = {"n_min": "--n-min", "n_max": "--n-max", "lam": "--lambda"}
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        for key in sorted(ALLOWED[cmd]):
            sp.add_argument(names.get(key, "--" + key), dest=key, **flags[key])
        sp.add_argument("--out", type=Path, default=None, help=f"output directory (default ${OUT_ENV} or cwd)")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out") and v is not None}
    try:
        cfg = RunConfig(args.command, params, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status, files = run(cfg)
    for f in files:
        print(f)
    return status


if __name__ == "__main__":
    sys.exit(main())
