"""Second-order initial value problems and executable checks of the linear theory.

``integrate_second_order`` runs classic RK4 on ``(y, y')``.  The remaining
functions turn the existence/uniqueness, superposition and Wronskian
theorems for ``y'' + P y' + Q y = R`` into measurable quantities
(residuals, convergence ratios, the Abel relation ``W' = -P W``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .integrators import rk4
from .series import BivariatePolynomial


@dataclass(frozen=True)
class SecondOrderIVP:
    """``y'' = rhs(x, y, y')`` with ``y(x0) = alpha``, ``y'(x0) = beta``."""

    rhs: Callable[[float, float, float], float]
    x0: float
    alpha: float
    beta: float


def linear_ivp(P, Q, R=None, x0=0.0, alpha=0.0, beta=0.0) -> SecondOrderIVP:
    """IVP for ``y'' + P(x) y' + Q(x) y = R(x)``."""
    if R is None:
        return SecondOrderIVP(lambda x, y, yp: -P(x) * yp - Q(x) * y, x0, alpha, beta)
    return SecondOrderIVP(lambda x, y, yp: R(x) - P(x) * yp - Q(x) * y, x0, alpha, beta)


def catenary_ivp(a: float = 1.0) -> SecondOrderIVP:
    """Hanging chain ``y'' = a sqrt(1 + y'**2)``, lowest point ``(0, 1/a)``."""
    return SecondOrderIVP(lambda x, y, yp: a * math.sqrt(1.0 + yp * yp), 0.0, 1.0 / a, 0.0)


def bernoulli1716_ivp(x0: float = 1.0, alpha: float = 1.0, beta: float = 2.0) -> SecondOrderIVP:
    """``y'' = 2y/x**2``; the default data pick out ``y = x**2``."""
    return SecondOrderIVP(lambda x, y, yp: 2.0 * y / (x * x), x0, alpha, beta)


def recast_first_order(f: BivariatePolynomial, x0: float, y0: float) -> SecondOrderIVP:
    """Differentiate ``y' = f(x, y)`` once: ``y'' = f_x + f_y * y'``."""
    fx, fy = f.partial_x(), f.partial_y()
    x0, y0 = float(x0), float(y0)
    return SecondOrderIVP(lambda x, y, yp: float(fx(x, y)) + float(fy(x, y)) * yp,
                          x0, y0, float(f(x0, y0)))


@dataclass(frozen=True)
class Trajectory:
    grid: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    step: float

    def __post_init__(self):
        if not (len(self.grid) == len(self.y) == len(self.yp)):
            raise ValueError("grid, y and yp must have equal lengths")
        for arr in (self.grid, self.y, self.yp):
            arr.setflags(write=False)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y,yp\n")
            for row in zip(self.grid, self.y, self.yp):
                fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def integrate_second_order(ivp: SecondOrderIVP, x_end: float, step: float) -> Trajectory:
    if not x_end > ivp.x0:
        raise ValueError("x_end must exceed x0")

    def field(x, s):
        return np.array([s[1], ivp.rhs(x, s[0], s[1])])

    xs, states = rk4(field, ivp.x0, [ivp.alpha, ivp.beta], x_end, step)
    h = xs[1] - xs[0]
    return Trajectory(xs, states[:, 0].copy(), states[:, 1].copy(), float(h))


def _check_grids(t1: Trajectory, t2: Trajectory) -> None:
    if len(t1.grid) != len(t2.grid) or np.max(np.abs(t1.grid - t2.grid)) > 1e-12 * max(
            1.0, float(np.max(np.abs(t1.grid)))):
        raise ValueError("trajectories live on different grids")


def wronskian_of(t1: Trajectory, t2: Trajectory) -> np.ndarray:
    """``W = y1 y2' - y2 y1'`` at each grid point."""
    _check_grids(t1, t2)
    return t1.y * t2.yp - t2.y * t1.yp


def finite_difference(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order derivative estimate: centered inside, one-sided at the ends."""
    out = np.empty_like(values, dtype=float)
    out[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    out[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h)
    out[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * h)
    return out


def wronskian_zero_threshold(t1: Trajectory, t2: Trajectory) -> float:
    s = (1.0 + np.max(np.abs(t1.y)) * np.max(np.abs(t2.yp))
         + np.max(np.abs(t2.y)) * np.max(np.abs(t1.yp)))
    return 1e-10 * float(s)


class AbelReport(NamedTuple):
    deviation: float          # max |W' + P W| on interior points
    identically_zero: bool
    never_vanished: bool
    passed: bool              # deviation <= tol


def abel_check(P, t1: Trajectory, t2: Trajectory, tol: float = 1e-5) -> AbelReport:
    w = wronskian_of(t1, t2)
    dw = finite_difference(w, t1.step)
    p = np.array([P(x) for x in t1.grid])
    deviation = float(np.max(np.abs(dw[1:-1] + p[1:-1] * w[1:-1])))
    thresh = wronskian_zero_threshold(t1, t2)
    absw = np.abs(w)
    return AbelReport(deviation, bool(np.max(absw) <= thresh), bool(np.min(absw) > thresh),
                      deviation <= tol)


def linear_residual(P, Q, traj: Trajectory, R=None) -> np.ndarray:
    """``y'' + P y' + Q y - R`` on interior points, ``y''`` by a centered second difference."""
    h = traj.step
    x = traj.grid[1:-1]
    ypp = (traj.y[2:] - 2 * traj.y[1:-1] + traj.y[:-2]) / (h * h)
    res = ypp + np.array([P(v) for v in x]) * traj.yp[1:-1] + np.array([Q(v) for v in x]) * traj.y[1:-1]
    if R is not None:
        res = res - np.array([R(v) for v in x])
    return res


def superposition_check(P, Q, ic_sets: Sequence[tuple[float, float]], c1: float, c2: float,
                        x0: float = 0.0, x_end: float = 1.0, step: float = 1e-3) -> float:
    """Max residual of ``c1 y1 + c2 y2`` for two solutions of the homogeneous equation."""
    (a1, b1), (a2, b2) = ic_sets
    t1 = integrate_second_order(linear_ivp(P, Q, x0=x0, alpha=a1, beta=b1), x_end, step)
    t2 = integrate_second_order(linear_ivp(P, Q, x0=x0, alpha=a2, beta=b2), x_end, step)
    combo = Trajectory(t1.grid.copy(), c1 * t1.y + c2 * t2.y, c1 * t1.yp + c2 * t2.yp, t1.step)
    return float(np.max(np.abs(linear_residual(P, Q, combo))))


def uniqueness_probe(ivp: SecondOrderIVP, x_end: float, steps: tuple[float, float]) -> float:
    """Max gap between integrations at two step sizes, on the coarse grid.

    ``steps[0]`` must be an integer multiple of ``steps[1]``.  For a
    well-posed smooth problem the gap shrinks like ``step**4``.
    """
    coarse, fine = steps
    ratio = coarse / fine
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > 1e-9 * ratio:
        raise ValueError("coarse step must be an integer multiple of the fine step")
    tc = integrate_second_order(ivp, x_end, coarse)
    tf = integrate_second_order(ivp, x_end, fine)
    sub = tf.y[::stride]
    if len(sub) != len(tc.y):
        raise ValueError("step sizes do not produce nested grids over this interval")
    return float(np.max(np.abs(tc.y - sub)))
