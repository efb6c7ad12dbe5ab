"""Classic fourth-order Runge-Kutta stepping shared by the numeric modules."""

from __future__ import annotations

import math

import numpy as np


class NonFiniteStateError(ArithmeticError):
    """Raised when an integration produces NaN or infinity."""


def uniform_steps(t0: float, t1: float, step: float) -> tuple[int, float]:
    """Number of steps and the adjusted step that lands exactly on ``t1``."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    span = t1 - t0
    n = max(1, int(round(abs(span) / step)))
    return n, span / n


def rk4_step(fun, t, state, h):
    k1 = fun(t, state)
    k2 = fun(t + h / 2, state + (h / 2) * k1)
    k3 = fun(t + h / 2, state + (h / 2) * k2)
    k4 = fun(t + h, state + h * k3)
    return state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4(fun, t0: float, state0, t1: float, step: float):
    """Integrate ``state' = fun(t, state)`` from ``t0`` to ``t1``.

    Returns ``(ts, states)`` with ``states[k]`` the state at ``ts[k]``.
    The step is shrunk slightly so that an integer number of steps ends on
    ``t1``.
    """
    n, h = uniform_steps(t0, t1, step)
    state = np.asarray(state0, dtype=float)
    ts = t0 + h * np.arange(n + 1)
    ts[-1] = t1
    out = np.empty((n + 1,) + state.shape)
    out[0] = state
    for k in range(n):
        state = rk4_step(fun, ts[k], state, h)
        if not np.all(np.isfinite(state)):
            raise NonFiniteStateError(f"non-finite state at t={ts[k + 1]!r}")
        out[k + 1] = state
    return ts, out


def rk4_scalar(fun, t0: float, y0: float, t1: float, step: float) -> float:
    """Endpoint value of a scalar RK4 integration of ``y' = fun(t, y)``."""
    n, h = uniform_steps(t0, t1, step)
    y = float(y0)
    for k in range(n):
        t = t0 + k * h
        k1 = fun(t, y)
        k2 = fun(t + h / 2, y + h / 2 * k1)
        k3 = fun(t + h / 2, y + h / 2 * k2)
        k4 = fun(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not math.isfinite(y):
            raise NonFiniteStateError(f"non-finite value at t={t + h!r}")
    return y
