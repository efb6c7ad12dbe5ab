"""Gauss hypergeometric series ``F(a, b, c, x)`` and elementary-function identities.

The series is generated by the coefficient recurrence

    a_{n+1} = (a + n)(b + n) / ((n + 1)(c + n)) * a_n,    a_0 = 1,

which is what makes it solve ``x(1-x) y'' + [c - (a+b+1)x] y' - ab y = 0``.
With rational parameters and a terminating series (``a`` or ``b`` a
nonpositive integer) everything is computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .series import (TruncatedSeries, as_scalar, is_exact, series_differentiate,
                     series_linear_combine, series_mul)

N_MAX = 10_000


class HypergeomDomainError(ValueError):
    """Inadmissible parameters or an argument outside the convergence disc."""


class HypergeomConvergenceError(ArithmeticError):
    """The stopping rule was not met within ``n_max`` terms."""


@dataclass(frozen=True)
class HypergeomParams:
    a: object
    b: object
    c: object
    x: object = 0

    def __post_init__(self):
        for name in ("a", "b", "c", "x"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))


def _nonpositive_integer(v) -> bool:
    return v <= 0 and v == int(v)


def _terminates(a, b) -> int | None:
    """Degree of the polynomial when the series terminates, else None."""
    degs = [int(-v) for v in (a, b) if _nonpositive_integer(v)]
    return min(degs) if degs else None


def _check_c(c) -> None:
    if _nonpositive_integer(c):
        raise HypergeomDomainError(f"c = {c} is zero or a negative integer")


def hypergeom_coefficients(a, b, c, n_terms: int) -> list:
    """First ``n_terms`` coefficients ``a_0 .. a_{n_terms-1}`` from the recurrence."""
    a, b, c = as_scalar(a), as_scalar(b), as_scalar(c)
    _check_c(c)
    exact = all(is_exact(v) for v in (a, b, c))
    coef = Fraction(1) if exact else 1.0
    out = []
    for n in range(n_terms):
        out.append(coef)
        coef = coef * ((a + n) * (b + n)) / ((n + 1) * (c + n))
    return out


class HypergeomResult(NamedTuple):
    value: object
    terms_used: int


def hypergeom_series(p: HypergeomParams, tol: float = 1e-15, n_max: int = N_MAX) -> HypergeomResult:
    """Partial sum of the series plus the number of terms summed.

    Summation stops once three consecutive terms satisfy
    ``|term| <= tol * |sum|``, when a terminating series runs out, or fails
    at ``n_max``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b, c, x = p.a, p.b, p.c, p.x
    _check_c(c)
    degree = _terminates(a, b)
    if degree is not None:
        exact = all(is_exact(v) for v in (a, b, c, x))
        one = Fraction(1) if exact else 1.0
        if not exact:
            a, b, c, x = float(a), float(b), float(c), float(x)
        total, term = one, one
        for n in range(degree):
            term = term * ((a + n) * (b + n)) / ((n + 1) * (c + n)) * x
            total += term
        return HypergeomResult(total, degree + 1)
    a, b, c, x = float(a), float(b), float(c), float(x)
    if not abs(x) < 1:
        raise HypergeomDomainError(f"|x| = {abs(x)} >= 1 for a non-terminating series")
    total, term, quiet = 1.0, 1.0, 0
    for n in range(n_max):
        term = term * ((a + n) * (b + n)) / ((n + 1) * (c + n)) * x
        total += term
        quiet = quiet + 1 if abs(term) <= tol * abs(total) else 0
        if quiet == 3:
            return HypergeomResult(total, n + 2)
    raise HypergeomConvergenceError(f"F({a}, {b}, {c}, {x}) not converged after {n_max} terms")


def hypergeom_F(p: HypergeomParams, tol: float = 1e-15, n_max: int = N_MAX):
    return hypergeom_series(p, tol, n_max).value


def F(a, b, c, x, tol: float = 1e-15):
    """Shorthand for ``hypergeom_F(HypergeomParams(a, b, c, x))``."""
    return hypergeom_F(HypergeomParams(a, b, c, x), tol)


def hypergeom_series_derivs(p: HypergeomParams, tol: float = 1e-15, n_max: int = N_MAX):
    """``(F, F', F'')`` at ``p.x`` by term-wise differentiation of the series."""
    a, b, c, x = (float(v) for v in (p.a, p.b, p.c, p.x))
    _check_c(c)
    degree = _terminates(a, b)
    if degree is None and not abs(x) < 1:
        raise HypergeomDomainError(f"|x| = {abs(x)} >= 1 for a non-terminating series")
    limit = degree + 1 if degree is not None else n_max
    f0 = f1 = f2 = 0.0
    coef, quiet = 1.0, 0
    for n in range(limit):
        t0 = coef * x**n
        t1 = n * coef * x ** (n - 1) if n >= 1 else 0.0
        t2 = n * (n - 1) * coef * x ** (n - 2) if n >= 2 else 0.0
        f0, f1, f2 = f0 + t0, f1 + t1, f2 + t2
        if degree is None and n > 2:
            small = (abs(t0) <= tol * abs(f0) and abs(t1) <= tol * abs(f1)
                     and abs(t2) <= tol * abs(f2))
            quiet = quiet + 1 if small else 0
            if quiet == 3:
                return f0, f1, f2
        coef = coef * ((a + n) * (b + n)) / ((n + 1) * (c + n))
    if degree is None:
        raise HypergeomConvergenceError("derivative series not converged")
    return f0, f1, f2


def hypergeom_second_solution(p: HypergeomParams, tol: float = 1e-15, n_max: int = N_MAX) -> float:
    """``x**(1-c) * F(a-c+1, b-c+1, 2-c, x)``, the solution independent of ``F``."""
    a, b, c, x = p.a, p.b, p.c, p.x
    if c > 0 and c == int(c):
        raise HypergeomDomainError(f"c = {c} is a positive integer; no second series solution")
    if not x > 0:
        raise HypergeomDomainError("the second solution needs x > 0")
    shifted = HypergeomParams(a - c + 1, b - c + 1, 2 - c, x)
    return float(x) ** float(1 - c) * float(hypergeom_F(shifted, tol, n_max))


def general_solution(p: HypergeomParams, c1: float, c2: float, tol: float = 1e-15) -> float:
    return c1 * float(hypergeom_F(p, tol)) + c2 * hypergeom_second_solution(p, tol)


def pointwise_residual(a, b, c, x, y, yp, ypp) -> float:
    """Left-hand side of Gauss's equation at one point."""
    return x * (1 - x) * ypp + (c - (a + b + 1) * x) * yp - a * b * y


def second_solution_residual(p: HypergeomParams, tol: float = 1e-15) -> float:
    """Residual of the equation for ``y = x**s g(x)``, ``s = 1 - c``, at ``p.x``."""
    a, b, c, x = (float(v) for v in (p.a, p.b, p.c, p.x))
    if not x > 0:
        raise HypergeomDomainError("the second solution needs x > 0")
    s = 1.0 - c
    g, g1, g2 = hypergeom_series_derivs(HypergeomParams(a - c + 1, b - c + 1, 2 - c, x), tol)
    xs = x**s
    y = xs * g
    yp = xs * (g1 + s * g / x)
    ypp = xs * (g2 + 2 * s * g1 / x + s * (s - 1) * g / (x * x))
    return pointwise_residual(a, b, c, x, y, yp, ypp)


def equation_residual_series(a, b, c, n_terms: int, coeffs: Sequence | None = None) -> TruncatedSeries:
    """Gauss's operator applied to a truncated series solution.

    ``coeffs`` defaults to the first ``n_terms`` hypergeometric coefficients.
    The result is known through order ``n_terms - 2``.
    """
    if n_terms < 3:
        raise ValueError("need at least 3 terms")
    a, b, c = as_scalar(a), as_scalar(b), as_scalar(c)
    if coeffs is None:
        coeffs = hypergeom_coefficients(a, b, c, n_terms)
    y = TruncatedSeries(0, tuple(coeffs[:n_terms]))
    top = n_terms - 2
    yp = series_differentiate(y)
    ypp = series_differentiate(yp)
    # y'' is known to order top - 1; the padding coefficient only reaches
    # orders above ``top`` once multiplied by x.
    zero = ypp[0] * 0
    ypp = TruncatedSeries(0, ypp.coeffs + (zero,))
    xs = TruncatedSeries.variable(top)
    x_minus_x2 = TruncatedSeries(0, (0, 1, -1) + (0,) * (top - 2)) if top >= 2 else xs
    term2 = series_mul(x_minus_x2, ypp)
    lin = series_linear_combine(c, TruncatedSeries.constant(1, top), -(a + b + 1), xs)
    term1 = series_mul(lin, yp)
    return series_linear_combine(1, series_linear_combine(1, term2, 1, term1), -(a * b), y.truncate(top))


def equation_residual(a, b, c, n_terms: int, coeffs: Sequence | None = None):
    """Largest absolute residual coefficient (exactly 0 for a true solution)."""
    return max(abs(v) for v in equation_residual_series(a, b, c, n_terms, coeffs).coeffs)


# -- elementary-function identities --------------------------------------------

def limit_identity_gap(kind: str, x: float, big: float) -> float:
    """``|finite-parameter expression - target|`` for the three limit rows.

    exp: ``F(1, B, 1, x/B) -> e**x``.
    sin: ``x F(B, B, 3/2, -x**2/(4B**2)) -> sin x``.
    cos: ``F(B, B, 1/2, -x**2/(4B**2)) -> cos x``.
    """
    if big < 1e3:
        raise ValueError("the limit parameter must be >= 1e3")
    x = float(x)
    if kind == "exp":
        arg = x / big
        if not abs(arg) < 1:
            raise HypergeomDomainError("x/B leaves the convergence disc")
        return abs(float(F(1, big, 1, arg)) - math.exp(x))
    arg = -x * x / (4 * big * big)
    if not abs(arg) < 1:
        raise HypergeomDomainError("-x^2/(4B^2) leaves the convergence disc")
    if kind == "sin":
        return abs(x * float(F(big, big, 1.5, arg)) - math.sin(x))
    if kind == "cos":
        return abs(float(F(big, big, 0.5, arg)) - math.cos(x))
    raise ValueError(f"unknown limit identity {kind!r}")


@dataclass(frozen=True)
class Identity:
    name: str
    via_series: Callable[[float], float]
    target: Callable[[float], float]
    grid: tuple


def _grid(lo: float, hi: float, n: int = 20) -> tuple:
    return tuple(lo + (hi - lo) * k / (n - 1) for k in range(n))


def table_identities(p: float = 0.5, b: float = 2.0, printed_arctan: bool = False) -> list[Identity]:
    """The four finite-parameter rows of the classical identity table.

    The inverse-tangent row uses ``x F(1/2, 1, 3/2, -x**2)``; with
    ``printed_arctan`` the ``F(1/2, 1/2, 1, -x**2)`` variant is appended
    (it does not hold).
    """
    grid = _grid(-0.9, 0.9)
    rows = [
        Identity(f"(1+x)^{p} = F(-p,b,b,-x)", lambda x: float(F(-p, b, b, -x)),
                 lambda x: (1 + x) ** p, grid),
        Identity("log(1+x) = x F(1,1,2,-x)", lambda x: x * float(F(1, 1, 2, -x)),
                 math.log1p, grid),
        Identity("asin x = x F(1/2,1/2,3/2,x^2)", lambda x: x * float(F(0.5, 0.5, 1.5, x * x)),
                 math.asin, grid),
        Identity("atan x = x F(1/2,1,3/2,-x^2)", lambda x: x * float(F(0.5, 1, 1.5, -x * x)),
                 math.atan, grid),
    ]
    if printed_arctan:
        rows.append(Identity("atan x = x F(1/2,1/2,1,-x^2) [printed variant]",
                             lambda x: x * float(F(0.5, 0.5, 1, -x * x)), math.atan, grid))
    return rows


class IdentityCheck(NamedTuple):
    name: str
    gap: float
    tol: float
    passed: bool


def identity_gap(identity: Identity) -> float:
    return max(abs(identity.via_series(x) - identity.target(x)) for x in identity.grid)


def run_identity_suite(tol: float = 1e-10, limit_tol: float = 1e-5, big: float = 1e6,
                       printed_arctan: bool = False) -> list[IdentityCheck]:
    """Finite rows on 20-point grids, then the limit rows at ``B = big``."""
    out = []
    for ident in table_identities(printed_arctan=printed_arctan):
        gap = identity_gap(ident)
        out.append(IdentityCheck(ident.name, gap, tol, gap <= tol))
    for kind, x in (("exp", 0.5), ("sin", 1.0), ("cos", 1.0)):
        gap = limit_identity_gap(kind, x, big)
        out.append(IdentityCheck(f"{kind} limit, x={x}, B={big:g}", gap, limit_tol, gap <= limit_tol))
    return out
