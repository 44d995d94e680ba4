import math

import mpmath
import numpy as np
import pytest

from lglbounds.coefficients import FunctionSpec
from lglbounds.errors import ConvergenceError, DomainError, ParameterError
from lglbounds.interp import (
    ERROR_FLOOR,
    BarycentricSet,
    DiffMatrix,
    barycentric_eval,
    barycentric_weights,
    diff_matrix,
    fit_geometric_rate,
    runge_diff_experiment,
    runge_interp_experiment,
)
from lglbounds.lobatto import lgl_points
from lglbounds.polycore import legendre_all


def lgl_set(n):
    return barycentric_weights(lgl_points(n).points)


def newton_form_mp(xs, fs, x, dps=50):
    """Oracle: Newton divided differences in extended precision."""
    with mpmath.workdps(dps):
        X = [mpmath.mpf(float(v)) for v in xs]
        c = [mpmath.mpf(float(v)) for v in fs]
        m = len(X)
        for j in range(1, m):
            for i in range(m - 1, j - 1, -1):
                c[i] = (c[i] - c[i - 1]) / (X[i] - X[i - j])
        t = mpmath.mpf(x)
        p = c[-1]
        for i in range(m - 2, -1, -1):
            p = p * (t - X[i]) + c[i]
        return float(p)


# --- barycentric weights -----------------------------------------------------------------------

def test_weights_three_points():
    b = barycentric_weights([-1.0, 0.0, 1.0])
    np.testing.assert_allclose(b.weights, [0.5, -1.0, 0.5], rtol=1e-15)


def test_weights_two_points():
    w = barycentric_weights([-1.0, 1.0]).weights
    assert abs(w[0]) == 1.0 and abs(w[1]) == 1.0 and w[0] * w[1] < 0


@pytest.mark.parametrize("n", [3, 10, 64, 500])
def test_weights_alternate_and_normalised(n):
    w = lgl_set(n).weights
    assert np.max(np.abs(w)) == 1.0
    assert np.all(w[:-1] * w[1:] < 0)


@pytest.mark.parametrize("n", [4, 17, 80, 300])
def test_lgl_weights_vs_legendre_values(n):
    # prod_{k != j}(x_j - x_k) is proportional to P_n(x_j) at the LGL points.
    b = lgl_set(n)
    ref = 1.0 / legendre_all(n, b.points)[n]
    ref /= np.max(np.abs(ref))
    s = np.sign(ref[0] * b.weights[0])
    np.testing.assert_allclose(s * b.weights, ref, rtol=1e-11, atol=1e-12)


def test_weights_large_n_finite():
    w = lgl_set(2000).weights
    assert np.all(np.isfinite(w)) and np.all(w != 0)


def test_weights_direct_product_small():
    x = np.array([-0.9, -0.2, 0.1, 0.75])
    w = barycentric_weights(x).weights
    ref = np.array([1 / np.prod([x[j] - x[k] for k in range(4) if k != j]) for j in range(4)])
    np.testing.assert_allclose(w, ref / np.max(np.abs(ref)), rtol=1e-14)


def test_weights_errors():
    with pytest.raises(ValueError):
        barycentric_weights([-0.5, 0.0, 0.0, 0.5])
    with pytest.raises(ValueError):
        barycentric_weights([0.5, -0.5])
    with pytest.raises(ValueError):
        barycentric_weights([0.1])
    with pytest.raises(DomainError):
        barycentric_weights([-1.5, 0.0])


def test_barycentric_set_immutable():
    b = lgl_set(5)
    assert b.n == 5 and len(b) == 6
    with pytest.raises(ValueError):
        b.weights[0] = 2.0
    with pytest.raises(ValueError):
        BarycentricSet([0.0, 0.0], [1.0, -1.0])


# --- evaluation ------------------------------------------------------------------------------------

def test_eval_at_nodes_exact():
    b = lgl_set(12)
    vals = np.cos(3 * b.points)
    np.testing.assert_array_equal(barycentric_eval(b, vals, b.points), vals)
    assert barycentric_eval(b, vals, b.points[4] + 5e-15) == vals[4]


def test_reproduces_p20():
    b = lgl_set(20)
    vals = legendre_all(20, b.points)[20]
    x = np.random.default_rng(11).uniform(-1, 1, 100)
    np.testing.assert_allclose(barycentric_eval(b, vals, x), legendre_all(20, x)[20], rtol=0, atol=1e-11)


@pytest.mark.parametrize("n", [5, 10, 20, 40, 50])
def test_polynomial_reproduction(n):
    rng = np.random.default_rng(n)
    c = rng.standard_normal(n + 1)
    b = lgl_set(n)
    x = rng.uniform(-1, 1, 200)
    got = barycentric_eval(b, np.polynomial.legendre.legval(b.points, c), x)
    tol = 1e-12 if n <= 20 else 1e-11
    np.testing.assert_allclose(got, np.polynomial.legendre.legval(x, c), rtol=0, atol=tol * np.sum(np.abs(c)))


def test_runge_against_newton_form():
    f = FunctionSpec.runge(5.0)
    b = lgl_set(40)
    got = barycentric_eval(b, f(b.points), 0.123)
    assert abs(got - newton_form_mp(b.points, f(b.points), 0.123)) <= 1e-11


def test_scale_invariance():
    b = lgl_set(30)
    vals = np.exp(b.points)
    x = np.linspace(-0.99, 0.99, 37)
    ref = barycentric_eval(b, vals, x)
    for s in (1e-200, -3.7, 1e150):
        scaled = BarycentricSet(b.points, b.weights * s)
        np.testing.assert_allclose(barycentric_eval(scaled, vals, x), ref, rtol=1e-14, atol=1e-14)


def test_eval_shape_and_errors():
    b = lgl_set(6)
    v = np.ones(7)
    assert np.ndim(barycentric_eval(b, v, 0.3)) == 0
    assert barycentric_eval(b, v, np.zeros((2, 3))).shape == (2, 3)
    with pytest.raises(ValueError):
        barycentric_eval(b, np.ones(6), 0.3)
    with pytest.raises(DomainError):
        barycentric_eval(b, v, 1.2)


# --- differentiation matrix ------------------------------------------------------------------------

def test_diff_matrix_n2():
    d = diff_matrix(lgl_set(2)).entries
    np.testing.assert_allclose(d, [[-1.5, 2, -0.5], [-0.5, 0, 0.5], [0.5, -2, 1.5]], atol=1e-15)


@pytest.mark.parametrize("n", [2, 8, 25, 40, 100])
def test_diff_row_sums(n):
    d = diff_matrix(lgl_set(n)).entries
    assert np.max(np.abs(d.sum(axis=1))) <= 1e-12


@pytest.mark.parametrize("n", [5, 12, 20, 40])
def test_diff_exact_on_monomials(n):
    b = lgl_set(n)
    d = diff_matrix(b)
    x = b.points
    for k in range(n + 1):
        ref = k * x ** (k - 1) if k else np.zeros_like(x)
        assert np.max(np.abs(d @ x**k - ref)) <= 1e-9


@pytest.mark.parametrize("n", [3, 10, 40])
def test_diff_x_squared(n):
    b = lgl_set(n)
    assert np.max(np.abs(diff_matrix(b) @ b.points**2 - 2 * b.points)) < 1e-12


@pytest.mark.parametrize("n", [4, 9, 30])
def test_diff_symmetry(n):
    d = diff_matrix(lgl_set(n)).entries
    np.testing.assert_allclose(d, -d[::-1, ::-1], rtol=0, atol=1e-12)


def test_diff_matrix_matches_numpy_derivative():
    b = lgl_set(16)
    c = np.random.default_rng(5).standard_normal(17)
    got = diff_matrix(b) @ np.polynomial.legendre.legval(b.points, c)
    ref = np.polynomial.legendre.legval(b.points, np.polynomial.legendre.legder(c))
    np.testing.assert_allclose(got, ref, atol=1e-10)


def test_diff_matrix_validation():
    with pytest.raises(ValueError):
        DiffMatrix(np.zeros((2, 3)))


# --- rate fitting ----------------------------------------------------------------------------------

def test_fit_recovers_synthetic_rate():
    n = np.arange(2, 120)
    err = 3.0 * n**1.5 * 1.3 ** (-n.astype(float))
    rho, log_c, used = fit_geometric_rate(n, err, power=1.5)
    assert rho == pytest.approx(1.3, rel=1e-12)
    assert log_c == pytest.approx(math.log(3.0), rel=1e-10)
    assert len(used) == 20 and used[-1] < 120


def test_fit_stops_at_floor():
    n = np.arange(1, 60)
    err = np.maximum(1.5 ** (-n.astype(float)), 1e-16)
    rho, _, used = fit_geometric_rate(n, err)
    assert rho == pytest.approx(1.5, rel=1e-10)
    assert 1.5 ** -float(used[-1]) > ERROR_FLOOR


def test_fit_degenerate():
    with pytest.raises(ConvergenceError):
        fit_geometric_rate([10, 20, 30], [1e-15, 1e-16, 1e-16])


# --- Runge experiments -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def interp5():
    return runge_interp_experiment(5.0)


def test_runge_interp_rate_a5(interp5):
    rho = (1 + math.sqrt(26)) / 5
    assert interp5.meta["rho_predicted"] == pytest.approx(1.2198039, abs=1e-7)
    assert abs(interp5.meta["rho_fitted"] - rho) / rho <= 0.02


def test_runge_interp_rate_a6():
    rep = runge_interp_experiment(6.0)
    rho = (1 + math.sqrt(37)) / 6
    assert rho == pytest.approx(1.1804604, abs=1e-7)
    assert abs(rep.meta["rho_fitted"] - rho) / rho <= 0.02


def test_runge_interp_errors_decrease(interp5):
    e = np.asarray(interp5.measured)
    live = e > ERROR_FLOOR
    stop = np.argmin(live) if not live.all() else e.size
    assert np.all(np.diff(e[:stop]) < 0)


def test_runge_diff_rate_a5():
    rep = runge_diff_experiment(5.0)
    rho = (1 + math.sqrt(26)) / 5
    assert abs(rep.meta["rho_fitted"] - rho) / rho <= 0.03


def test_diff_error_exceeds_interp_error():
    f = FunctionSpec.runge(5.0)
    b = lgl_set(40)
    xs = np.cos(np.linspace(0, math.pi, 10001))
    i = np.max(np.abs(barycentric_eval(b, f(b.points), xs) - f(xs)))
    d = np.max(np.abs(diff_matrix(b) @ f(b.points) - f.deriv(b.points)))
    assert d > i


def test_experiment_parameter_errors():
    with pytest.raises(ParameterError):
        runge_interp_experiment(5.0, [])
    with pytest.raises(ParameterError):
        runge_diff_experiment(5.0, [0, 4])
    with pytest.raises(ConvergenceError):
        runge_interp_experiment(0.5, range(150, 201))
