"""Numerical kernel: fixed-step RK4 and finite-difference stencils.

Every oracle in the package differentiates through these helpers, so they are
kept deliberately small and free of any Lie-theoretic knowledge.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

DEFAULT_DT = 1e-3
DEFAULT_FD_STEP = 1e-4


class IntegrationDiverged(RuntimeError):
    """Raised when a Runge-Kutta stage produces a non-finite value."""

    def __init__(self, t: float, stage: int):
        super().__init__(f"non-finite value at t={t!r}, stage {stage}")
        self.t = t
        self.stage = stage


def rk4_step(field: Callable, y: np.ndarray, t: float, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``y' = field(t, y)``."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    y = np.asarray(y, dtype=float)
    k1 = np.asarray(field(t, y), dtype=float)
    _check_stage(k1, t, 1)
    k2 = np.asarray(field(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
    _check_stage(k2, t, 2)
    k3 = np.asarray(field(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
    _check_stage(k3, t, 3)
    k4 = np.asarray(field(t + h, y + h * k3), dtype=float)
    _check_stage(k4, t, 4)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_stage(k: np.ndarray, t: float, stage: int) -> None:
    if not np.all(np.isfinite(k)):
        raise IntegrationDiverged(t, stage)


def rk4_integrate(field: Callable, y0, t_final: float, h: float,
                  stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Integrate on the uniform grid ``0, h, 2h, ..., t_final``.

    ``t_final`` is rounded to the nearest whole number of steps. Returns the
    sampled times and states, keeping every ``stride``-th step plus the last.
    """
    if not t_final > 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n = max(1, int(round(t_final / h)))
    y = np.asarray(y0, dtype=float).copy()
    ts = [0.0]
    ys = [y.copy()]
    for i in range(n):
        t = i * h
        y = rk4_step(field, y, t, h)
        if (i + 1) % stride == 0 or i + 1 == n:
            ts.append((i + 1) * h)
            ys.append(y.copy())
    return np.array(ts), np.array(ys)


def fd_derivative(sampler: Callable, t: float, h: float = DEFAULT_FD_STEP):
    """Fourth-order central difference of ``sampler`` at ``t``."""
    f = [np.asarray(sampler(t + j * h)) for j in (-2, -1, 1, 2)]
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)


def fd_second_derivative(sampler: Callable, t: float, h: float = 1e-3):
    """Fourth-order central second difference of ``sampler`` at ``t``."""
    f = [np.asarray(sampler(t + j * h)) for j in (-2, -1, 0, 1, 2)]
    return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)


def fd_directional(scalar_field: Callable, x, direction, h: float = DEFAULT_FD_STEP) -> float:
    """Directional derivative of ``scalar_field`` at ``x`` along ``direction``."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(direction, dtype=float)
    return float(fd_derivative(lambda s: scalar_field(x + s * d), 0.0, h))


def fd_gradient(scalar_field: Callable, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    eye = np.eye(x.size)
    return np.array([fd_directional(scalar_field, x, eye[i], h) for i in range(x.size)])


def grid_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference along axis 0 of uniformly sampled data.

    The first and last two samples have no centred stencil and are NaN.
    """
    values = np.asarray(values, dtype=float)
    out = np.full_like(values, np.nan)
    out[2:-2] = (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)
    return out


def uniform(rng: np.random.Generator, *shape) -> np.ndarray:
    """Components uniform in [-1, 1], the sampling convention used by all suites."""
    return rng.uniform(-1.0, 1.0, size=shape)
