"""Newton's series method for ``y' = f(x, y)`` with polynomial ``f``.

Newton substituted his current approximation into the right-hand side,
kept the lowest-degree terms and integrated again.  Truncated Picard
iteration does the same thing: after ``k`` passes the coefficient of
``(x - x0)**k`` no longer changes, so ``order + 1`` passes give the degree
``order`` Taylor polynomial of the solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .integrators import rk4_scalar
from .series import (
    BivariatePolynomial,
    TruncatedSeries,
    as_scalar,
    default_order,
    series_antiderivative,
    series_differentiate,
    series_eval,
    series_linear_combine,
    substitute_series,
)


@dataclass(frozen=True)
class SeriesIVP:
    f: BivariatePolynomial
    x0: object = 0
    y0: object = 0
    order: int = None

    def __post_init__(self):
        if self.order is None:
            object.__setattr__(self, "order", default_order())
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        object.__setattr__(self, "x0", as_scalar(self.x0))
        object.__setattr__(self, "y0", as_scalar(self.y0))


def picard_step(f: BivariatePolynomial, y: TruncatedSeries, y0) -> TruncatedSeries:
    """One pass of ``y <- y0 + integral of f(x, y)``, kept at ``y.order``."""
    return series_antiderivative(substitute_series(f, y), y0).truncate(y.order)


def solve_series_ivp(problem: SeriesIVP, iterations: int | None = None) -> TruncatedSeries:
    y = TruncatedSeries.constant(problem.y0, problem.order, problem.x0)
    if not problem.f.exact and y.exact:
        y = TruncatedSeries(y.center, tuple(float(c) for c in y.coeffs))
    for _ in range(problem.order + 1 if iterations is None else iterations):
        y = picard_step(problem.f, y, problem.y0)
    return y


def residual_of_series(f: BivariatePolynomial, y: TruncatedSeries) -> TruncatedSeries:
    """Series of ``y' - f(x, y)``, meaningful through order ``y.order - 1``."""
    dy = series_differentiate(y)
    rhs = substitute_series(f, y).truncate(dy.order)
    return series_linear_combine(1, dy, -1, rhs)


class CrossValidation(NamedTuple):
    series_value: float
    rk4_value: float
    gap: float


def cross_validate_rk4(problem: SeriesIVP, x_eval: float, dt: float) -> CrossValidation:
    """Compare the series at ``x_eval`` with an RK4 integration of the same IVP."""
    y = solve_series_ivp(problem)
    series_value = float(series_eval(y, x_eval))
    f = problem.f
    x0 = float(problem.x0)
    if x_eval == x0:
        rk4_value = float(problem.y0)
    else:
        rk4_value = rk4_scalar(lambda x, v: float(f(x, v)), x0, float(problem.y0),
                               float(x_eval), dt)
    return CrossValidation(series_value, rk4_value, abs(series_value - rk4_value))


def newton_example_rhs() -> BivariatePolynomial:
    """``1 - 3x + y + x**2 + x*y``, Newton's first worked equation."""
    return BivariatePolynomial.from_terms(
        [(0, 0, 1), (1, 0, -3), (0, 1, 1), (2, 0, 1), (1, 1, 1)])
