import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from lglbounds import cli
from lglbounds.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK, OUT_ENV, ConfigError, RunConfig, main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_phi_scaled_n2000(tmp_path):
    assert main(["phi-scaled", "--n", "2000", "--out", str(tmp_path)]) == EXIT_OK
    header, rows = read_csv(tmp_path / "phi-scaled_n2000.csv")
    assert header == ["x", "scaled"]
    peak = max(float(r[1]) for r in rows)
    assert 0.99 < peak < 1.0


def test_coeff_bounds_theta06(tmp_path):
    assert main(["coeff-bounds", "--theta", "0.6", "--n-max", "200", "--out", str(tmp_path)]) == EXIT_OK
    files = list(tmp_path.glob("coeff-bounds_*.csv"))
    assert len(files) == 1
    header, rows = read_csv(files[0])
    assert header == ["n", "measured", "bound", "ratio"]
    assert [int(r[0]) for r in rows] == list(range(2, 201))
    assert all(float(r[2]) >= float(r[1]) for r in rows)


def test_ellipse_min_endpoint(tmp_path):
    assert main(["ellipse-min", "--n", "8", "--rho", "1.05", "--out", str(tmp_path)]) == EXIT_OK
    header, rows = read_csv(tmp_path / "ellipse-min.csv")
    assert len(rows) == 1
    t = float(rows[0][header.index("theta_star")])
    assert min(abs(t), abs(t - math.pi)) <= 1e-6


def test_deterministic_bytes(tmp_path):
    args = ["linf-bounds", "--n-min", "3", "--n-max", "30"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and len(names) == 2
    for name in names:
        data = (a / name).read_bytes()
        assert data == (b / name).read_bytes()
        assert b"\r" not in data and data.endswith(b"\n")


def test_full_precision_floats(tmp_path):
    main(["phi-max", "--n-min", "1", "--n-max", "5", "--out", str(tmp_path)])
    header, rows = read_csv(tmp_path / "phi-max.csv")
    assert header == ["n", "value", "location", "bound_simple", "bound_sharp", "scaled"]
    v = float(rows[1][1])
    assert v == pytest.approx(5 / (3 * math.sqrt(3)), rel=1e-15)
    assert rows[1][1] == "%.17g" % v


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["phi-max", "--n-max", "4"]) == EXIT_OK
    assert (tmp_path / "env" / "phi-max.csv").exists()
    # --out wins over the environment
    assert main(["phi-max", "--n-max", "4", "--out", str(tmp_path / "flag")]) == EXIT_OK
    assert (tmp_path / "flag" / "phi-max.csv").exists()


def test_cwd_default(tmp_path, monkeypatch):
    monkeypatch.delenv(OUT_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    assert main(["phi-max", "--n-max", "3"]) == EXIT_OK
    assert (tmp_path / "phi-max.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["coeff-bounds", "--theta", "1.2"],
        ["ellipse-min", "--rho", "0.9"],
        ["phi-max", "--n-min", "0"],
        ["phi-max", "--n-min", "10", "--n-max", "5"],
        ["interp-runge", "--a", "-1"],
        ["coeff-bounds", "--kind", "trunc_pow2", "--n-max", "2"],
        ["linf-bounds", "--grid", "2001"],
    ],
)
def test_config_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIG
    assert not any(tmp_path.iterdir())


def test_unknown_flag_is_config_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["phi-max", "--theta", "0.2", "--out", str(tmp_path)])
    assert exc.value.code == EXIT_CONFIG


def test_runconfig_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig("phi-max", {"rho": 2.0})
    with pytest.raises(ConfigError):
        RunConfig("plot", {})


def test_convergence_exit(tmp_path):
    argv = ["interp-runge", "--a", "0.5", "--n-min", "150", "--n-max", "200", "--out", str(tmp_path)]
    assert main(argv) == EXIT_CONVERGENCE


def test_runge_defaults_report_rates(tmp_path, capsys):
    assert main(["interp-runge", "--a", "5", "--out", str(tmp_path)]) == EXIT_OK
    assert "fitted rho" in capsys.readouterr().out
    header, rows = read_csv(tmp_path / "interp-runge_a5.csv")
    assert [int(r[0]) for r in rows] == list(range(2, 201, 2))


def test_ggl_negative_lambda_has_no_bound(tmp_path):
    assert main(["ggl-max", "--lambda", "-0.3", "--n-max", "5", "--grid", "501", "--out", str(tmp_path)]) == EXIT_OK
    header, rows = read_csv(tmp_path / "ggl-max_lambdam0.3.csv")
    assert all(math.isnan(float(r[2])) for r in rows)


def test_l2_bounds_dominate(tmp_path):
    assert main(["l2-bounds", "--theta", "0.3", "--n-max", "60", "--out", str(tmp_path)]) == EXIT_OK
    for f in tmp_path.glob("l2-bounds_*.csv"):
        _, rows = read_csv(f)
        m = np.array([[float(r[1]), float(r[2])] for r in rows])
        assert np.all(m[:, 1] >= m[:, 0])


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "lglbounds.cli", "phi-max", "--n-max", "3", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "phi-max.csv" in proc.stdout


def test_every_command_has_handler():
    assert set(cli.HANDLERS) == set(cli.COMMANDS) == set(cli.ALLOWED)


@pytest.mark.parametrize("command", [c for c in cli.COMMANDS if c != "verify-all"])
def test_default_runtime_under_a_minute(command, tmp_path):
    import time

    t0 = time.perf_counter()
    assert main([command, "--out", str(tmp_path)]) == EXIT_OK
    assert time.perf_counter() - t0 < 60
