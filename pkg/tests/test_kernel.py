import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matchedpair.kernel import (IntegrationDiverged, fd_derivative, fd_directional,
                                fd_gradient, fd_second_derivative, grid_derivative,
                                rk4_integrate, rk4_step)


def test_rk4_zero_field_keeps_state():
    y0 = np.array([1.5, -2.0])
    assert np.array_equal(rk4_step(lambda t, y: np.zeros_like(y), y0, 0.0, 0.1), y0)


def test_rk4_one_step_matches_degree_four_taylor_sum():
    h = 0.1
    taylor = sum(h ** k / math.factorial(k) for k in range(5))
    y = rk4_step(lambda t, y: y, np.array([1.0]), 0.0, h)
    assert abs(y[0] - taylor) < 1e-15
    assert abs(y[0] - 1.1051708333333334) < 1e-15


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.floats(-1, 1))
def test_rk4_exact_for_cubic_forcing(coef, y0):
    a, b, c, d = coef
    field = lambda t, y: np.array([a + b * t + c * t ** 2 + d * t ** 3])  # noqa: E731
    ts, ys = rk4_integrate(field, [y0], 1.0, 0.125)
    exact = y0 + a + b / 2 + c / 3 + d / 4
    assert abs(ys[-1, 0] - exact) < 1e-13


def test_rk4_global_order_is_four():
    field = lambda t, y: -y  # noqa: E731
    errs = [abs(rk4_integrate(field, [1.0], 2.0, h)[1][-1, 0] - math.exp(-2.0))
            for h in (0.1, 0.05)]
    assert 15.0 < errs[0] / errs[1] < 17.0


def test_rk4_grid_and_stride():
    ts, ys = rk4_integrate(lambda t, y: np.ones(1), [0.0], 1.0, 0.01, stride=10)
    assert len(ts) == 11
    assert np.allclose(ts, np.linspace(0, 1, 11))
    assert np.allclose(ys[:, 0], ts)


def test_rk4_reports_divergence():
    with pytest.raises(IntegrationDiverged) as info, np.errstate(over="ignore", invalid="ignore"):
        rk4_integrate(lambda t, y: y * y, [1.0], 5.0, 0.5)
    assert info.value.stage in (1, 2, 3, 4)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_rk4_rejects_nonpositive_horizon(bad):
    with pytest.raises(ValueError):
        rk4_integrate(lambda t, y: y, [1.0], bad, 0.1)


def test_fd_derivative_examples():
    assert fd_derivative(lambda t: 3.0, 0.2) == 0.0
    assert abs(fd_derivative(lambda t: t ** 4, 1.0, 1e-3) - 4.0) < 1e-9
    assert abs(fd_derivative(np.sin, 0.0, 1e-3) - 1.0) < 1e-12


def test_fd_second_derivative():
    assert abs(fd_second_derivative(np.sin, 0.3) + math.sin(0.3)) < 1e-8


def test_fd_directional_and_gradient():
    x = np.array([0.3, -1.2, 2.0])
    half_sq = lambda v: 0.5 * v @ v  # noqa: E731
    for i in range(3):
        assert abs(fd_directional(half_sq, x, np.eye(3)[i]) - x[i]) < 1e-9
    a = np.array([1.0, -2.0, 0.5])
    assert abs(fd_directional(lambda v: a @ v, x, np.array([0.0, 1.0, 0.0])) + 2.0) < 1e-11
    assert np.allclose(fd_gradient(half_sq, x), x, atol=1e-9)


def test_grid_derivative_exact_on_quartics_and_nan_ends():
    h = 0.1
    t = np.arange(12) * h
    vals = np.column_stack([t ** 4, 2 * t])
    d = grid_derivative(vals, h)
    assert np.all(np.isnan(d[:2])) and np.all(np.isnan(d[-2:]))
    assert np.allclose(d[2:-2, 0], 4 * t[2:-2] ** 3, atol=1e-11)
    assert np.allclose(d[2:-2, 1], 2.0, atol=1e-12)
