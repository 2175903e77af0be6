import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from heatlab.harness.fitting import (bisect_constant, d_scan, fit_exponential_constant, fit_gaussian,
                                     gaussian_rate, gaussian_ratio, lambert_constant, make_report,
                                     relative_drift)
from heatlab.models import BoundSpec

SPEC = BoundSpec(name="unit", form="C e^{C tau}")


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(1e-3, 10.0))
def test_lambert_constant_solves_the_equation(q, rate):
    C = lambert_constant(q, rate)
    assert C > 0
    assert_allclose(C * np.exp(C * rate), q, rtol=1e-8)


def test_lambert_constant_degenerate_cases():
    assert lambert_constant(0.0, 1.0) == 0.0
    assert lambert_constant(-1.0, 1.0) == 0.0
    assert lambert_constant(3.0, 0.0) == 3.0


def test_exponential_constant_is_tight():
    tau = np.array([0.1, 0.5, 1.0])
    data = 2.0 * np.exp(2.0 * tau)
    assert_allclose(fit_exponential_constant(data, 1.0, tau), 2.0, rtol=1e-9)
    assert fit_exponential_constant(np.zeros(3), 1.0, tau, floor=1.0) == 1.0


def test_bisect_constant():
    assert_allclose(bisect_constant(lambda C: C - 3.0), 3.0, rtol=1e-9)
    assert bisect_constant(lambda C: 1.0, lo=0.5) == 0.5
    assert_allclose(bisect_constant(lambda C: C - 5e7), 5e7, rtol=1e-9)


def test_gaussian_rate_and_fit_recover_constants():
    t = np.array([0.1, 0.1, 0.5, 0.5])
    rho = np.array([0.5, 1.0, 1.0, 2.0])
    volume = np.full(4, 2.0)
    data = 1.5 / volume * np.exp(1.5 * t - 0.25 * rho ** 2 / t)
    diagonal = 1.5 / volume * np.exp(1.5 * t)
    assert_allclose(gaussian_rate(t, rho, data, diagonal), 0.25, rtol=1e-9)
    fit = fit_gaussian(t, rho, data, volume, diagonal=diagonal)
    assert_allclose(fit["D"], 0.25, rtol=1e-9)
    assert_allclose(fit["C"], 1.5, rtol=1e-8)
    assert gaussian_ratio(t, rho, data, volume, fit["C"], fit["D"]) <= 1.0 + 1e-9


def test_gaussian_rate_without_far_pairs_is_unbounded():
    assert gaussian_rate([1.0], [0.5], [0.1], [1.0]) == np.inf


def test_d_scan_is_monotone():
    t = np.array([0.2, 0.5, 1.0])
    rho = np.array([1.0, 1.0, 2.0])
    data = np.exp(-0.3 * rho ** 2 / t)
    table, monotone = d_scan(t, rho, data, 1.0, D_max=0.3, points=5)
    assert table.shape == (5, 2)
    assert monotone


def test_relative_drift():
    assert relative_drift({"C": 1.0, "D": 2.0}, {"C": 1.05, "D": 2.0}) == pytest.approx(0.05 / 1.05)
    assert relative_drift({"C": 1.0}, {"C": np.inf}) == np.inf
    assert relative_drift({"C": 0.0}, {"C": 0.0}) == 0.0


@pytest.mark.parametrize(
    "constants,max_ratio,drift,conditions,passed",
    [
        ({"C": 1.0}, 1.0, 0.0, None, True),
        ({"C": 1.0}, 1.0 + 1e-10, 0.05, {"ok": True}, True),
        ({"C": np.inf}, 1.0, 0.0, None, False),
        ({"C": 1.0}, 1.01, 0.0, None, False),
        ({"C": 1.0}, 1.0, 0.5, None, False),
        ({"C": 1.0}, 1.0, 0.0, {"ok": True, "other": False}, False),
    ],
)
def test_make_report_pass_logic(constants, max_ratio, drift, conditions, passed):
    report = make_report(SPEC, constants, max_ratio, drift, manifold="flat_torus2", conditions=conditions)
    assert report.passed is passed
    assert report.name == "unit"
    if conditions:
        assert report.details["conditions"] == conditions
