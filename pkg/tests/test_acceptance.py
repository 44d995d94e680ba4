"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
when output capture is on.
"""
import numpy as np
import pytest

from lglbounds import verify
from lglbounds.lobatto import phi_lgl

CRITERIA = {check.__name__: i + 1 for i, check in enumerate(verify.CHECKS)}


def _run(check, capsys):
    r = check()
    with capsys.disabled():
        print("\n" + verify.format_line(r))
    return r


def _assert_passed(r):
    failed = [k for k, v in r.parts.items() if not v]
    assert r.passed, f"criterion {r.number} failed parts: {failed} ({r.detail})"


def test_criterion_01_lgl_maximum(capsys):
    r = _run(verify.check_lgl_max, capsys)
    # independent dense-grid look at the small degrees behind the monotonicity part
    x = np.linspace(-1, 1, 200001)
    s = [np.max(np.abs(phi_lgl(n, x))) * np.sqrt(2 * np.pi * n) / 4 for n in (1, 2, 3)]
    assert s[1] < s[0] < s[2]
    _assert_passed(r)


def test_criterion_02_coefficient_bound(capsys):
    _assert_passed(_run(verify.check_coeff_bound, capsys))


def test_criterion_03_bound_comparisons(capsys):
    _assert_passed(_run(verify.check_bound_comparisons, capsys))


def test_criterion_04_l2_bound(capsys):
    _assert_passed(_run(verify.check_l2_bound, capsys))


def test_criterion_05_interior_linf(capsys):
    _assert_passed(_run(verify.check_interior_linf, capsys))


def test_criterion_06_bernstein_margin(capsys):
    _assert_passed(_run(verify.check_bernstein_margin, capsys))


def test_criterion_07_ggl(capsys):
    _assert_passed(_run(verify.check_ggl, capsys))


def test_criterion_08_ellipse_minimum(capsys):
    _assert_passed(_run(verify.check_ellipse_min, capsys))


def test_criterion_09_runge(capsys):
    _assert_passed(_run(verify.check_runge, capsys))


def test_criterion_10_infrastructure(capsys):
    _assert_passed(_run(verify.check_infrastructure, capsys))


def test_checks_are_numbered_in_order():
    assert list(CRITERIA.values()) == list(range(1, 11))
    assert len(verify.CHECKS) == 10


@pytest.mark.parametrize("passed,tag", [(True, "[PASS]"), (False, "[FAIL]")])
def test_format_line(passed, tag):
    r = verify.CheckResult(3, "demo", passed, "x=1")
    assert verify.format_line(r) == f"{tag}  3 demo: x=1"
