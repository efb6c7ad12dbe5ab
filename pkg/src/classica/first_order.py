"""First-order equations: separation of variables, linear equations by an
exponential integrating factor, monomial integrating factors for
``M dx + N dy = 0``, and the elastica quadrature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .quadrature import integrate
from .series import BivariatePolynomial, is_exact


class TurningPointError(ValueError):
    """``g(y)`` changes sign between the start value and the solution."""


class BracketError(ValueError):
    """No sign change was found before leaving the ``y`` domain."""


class SingularCoefficientError(ValueError):
    """A coefficient of the linear equation is not finite on the interval."""


@dataclass(frozen=True)
class SeparableODE:
    """``g(y) dy = f(x) dx``, i.e. ``dy/dx = f(x) / g(y)``."""

    f: Callable[[float], float]
    g: Callable[[float], float]
    x_domain: tuple = (-math.inf, math.inf)
    y_domain: tuple = (-math.inf, math.inf)


def separable_preset(name: str, **params) -> SeparableODE:
    """Historical separable equations.

    ``leibniz``
        ``dy/dx = x``.
    ``isochrone``
        ``dy/dx = sqrt(a / (b*y - a))`` on ``y > a/b`` (parameters ``a``, ``b``).
    ``catenary-p``
        slope equation ``dp / sqrt(1 + p**2) = a dx`` of the hanging chain.
    """
    if name == "leibniz":
        return SeparableODE(lambda x: x, lambda y: 1.0)
    if name == "isochrone":
        a = float(params.get("a", 1.0))
        b = float(params.get("b", 1.0))
        return SeparableODE(lambda x: 1.0, lambda y: math.sqrt((b * y - a) / a),
                            y_domain=(a / b, math.inf))
    if name == "catenary-p":
        a = float(params.get("a", 1.0))
        return SeparableODE(lambda x: a, lambda p: 1.0 / math.sqrt(1.0 + p * p))
    raise ValueError(f"unknown separable preset {name!r}")


def solve_separable(ode: SeparableODE, x0: float, y0: float, x_target: float,
                    tol: float = 1e-12) -> float:
    """Solve ``G(y) - G(y0) = F(x_target) - F(x0)`` for ``y``.

    The bracket grows from ``y0`` in the direction of ``sign(f/g)`` and is
    then bisected down to ``1e-13``.
    """
    lo_x, hi_x = ode.x_domain
    if not (lo_x <= x_target <= hi_x and lo_x <= x0 <= hi_x):
        raise ValueError(f"x={x_target} is outside the domain {ode.x_domain}")
    target, _ = integrate(ode.f, x0, x_target, tol / 4)
    if target == 0:
        return float(y0)
    g0 = ode.g(y0)
    if g0 == 0 or not math.isfinite(g0):
        raise TurningPointError(f"g(y0) = {g0}; the start value is a turning point")
    sign = math.copysign(1.0, g0)
    direction = math.copysign(1.0, target) * sign
    ylo, yhi = ode.y_domain

    def phi(y, base_y, base_val):
        gy = ode.g(y)
        if gy * sign <= 0:
            raise TurningPointError(f"g changes sign between y0={y0} and y={y}")
        val, _ = integrate(ode.g, base_y, y, tol / 4)
        return base_val + val

    step = max(1e-3, 1e-3 * abs(y0))
    inner, inner_val = float(y0), -target
    outer = None
    for _ in range(200):
        cand = y0 + direction * step
        if not ylo < cand < yhi:
            edge = ylo if direction < 0 else yhi
            if not math.isfinite(edge):
                raise BracketError("bracket search overflowed")
            cand = inner + 0.5 * (edge - inner)
            if abs(cand - inner) < 1e-15 * max(1.0, abs(cand)):
                raise BracketError(f"root not bracketed inside y domain {ode.y_domain}")
        val = phi(cand, inner, inner_val)
        if val == 0:
            return cand
        if math.copysign(1.0, val) != math.copysign(1.0, inner_val):
            outer = cand
            break
        inner, inner_val = cand, val
        step *= 2
    if outer is None:
        raise BracketError("root not bracketed")
    a, fa = inner, inner_val
    b = outer
    while abs(b - a) > 1e-13 * max(1.0, abs(a)):
        mid = 0.5 * (a + b)
        if not (min(a, b) < mid < max(a, b)):
            break
        fm = phi(mid, a, fa)
        if fm == 0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _check_finite(fun, x0, x1, name):
    for k in range(65):
        x = x0 + (x1 - x0) * k / 64
        v = fun(x)
        if not math.isfinite(v):
            raise SingularCoefficientError(f"{name}({x}) = {v} is not finite")


def solve_linear_first_order(p, q, x0: float, y0: float, x_target: float,
                             tol: float = 1e-12) -> float:
    """``y' + p(x) y = q(x)`` by the integrating factor ``exp(integral of p)``."""
    try:
        _check_finite(p, x0, x_target, "p")
        _check_finite(q, x0, x_target, "q")
    except (ZeroDivisionError, ValueError) as exc:
        if isinstance(exc, SingularCoefficientError):
            raise
        raise SingularCoefficientError(str(exc)) from exc

    def mu(s):
        return math.exp(integrate(p, x0, s, tol * 1e-2)[0])

    acc, _ = integrate(lambda s: mu(s) * q(s), x0, x_target, tol * 1e-1)
    return (y0 + acc) / mu(x_target)


# -- integrating factors -----------------------------------------------------

@dataclass(frozen=True)
class DifferentialForm:
    """``M(x, y) dx + N(x, y) dy = 0``."""

    M: BivariatePolynomial
    N: BivariatePolynomial

    def __post_init__(self):
        if not self.M and not self.N:
            raise ValueError("M and N are both identically zero")


def _shifted(poly: BivariatePolynomial, alpha: int, beta: int) -> dict:
    return {(i + alpha, j + beta): c for (i, j), c in poly.terms.items()}


def _same_laurent(lhs: dict, rhs: dict) -> bool:
    keys = set(lhs) | set(rhs)
    for key in keys:
        a, b = lhs.get(key, 0), rhs.get(key, 0)
        if is_exact(a) and is_exact(b):
            if a != b:
                return False
        elif abs(a - b) > 1e-12 * max(1.0, abs(a), abs(b)):
            return False
    return True


def exactness_check(form: DifferentialForm, mu_exponents: tuple[int, int]) -> bool:
    """True iff ``x**a y**b (M dx + N dy)`` is an exact differential."""
    alpha, beta = mu_exponents
    mm = _shifted(form.M, alpha, beta)
    nn = _shifted(form.N, alpha, beta)
    dm_dy: dict = {}
    for (i, j), c in mm.items():
        if j:
            dm_dy[(i, j - 1)] = dm_dy.get((i, j - 1), 0) + j * c
    dn_dx: dict = {}
    for (i, j), c in nn.items():
        if i:
            dn_dx[(i - 1, j)] = dn_dx.get((i - 1, j), 0) + i * c
    dm_dy = {k: v for k, v in dm_dy.items() if v != 0}
    dn_dx = {k: v for k, v in dn_dx.items() if v != 0}
    return _same_laurent(dm_dy, dn_dx)


def has_log_potential(form: DifferentialForm, mu_exponents: tuple[int, int]) -> bool:
    """True when integrating the multiplied form produces ``log x`` or ``log y``."""
    alpha, beta = mu_exponents
    mm = _shifted(form.M, alpha, beta)
    nn = _shifted(form.N, alpha, beta)
    return any(i == -1 for i, _ in mm) or any(j == -1 for _, j in nn)


def exact_potential(form: DifferentialForm, mu_exponents: tuple[int, int]) -> dict:
    """Laurent terms ``{(i, j): c}`` of ``Phi`` with ``dPhi = mu (M dx + N dy)``.

    Only defined for exact, logarithm-free forms.  For ``2y dx - x dy`` with
    ``mu = x/y**2`` this is ``x**2 / y``.
    """
    if not exactness_check(form, mu_exponents):
        raise ValueError("form is not exact with this factor")
    if has_log_potential(form, mu_exponents):
        raise ValueError("potential contains a logarithm")
    alpha, beta = mu_exponents
    phi: dict = {}
    for (i, j), c in _shifted(form.M, alpha, beta).items():
        phi[(i + 1, j)] = phi.get((i + 1, j), 0) + (Fraction(c) / (i + 1) if is_exact(c) else c / (i + 1))
    for (i, j), c in _shifted(form.N, alpha, beta).items():
        if i == 0:
            phi[(0, j + 1)] = phi.get((0, j + 1), 0) + (Fraction(c) / (j + 1) if is_exact(c) else c / (j + 1))
    return {k: v for k, v in sorted(phi.items()) if v != 0}


def find_monomial_integrating_factor(form: DifferentialForm, bound: int = 4, *,
                                     allow_log: bool = False) -> tuple[int, int] | None:
    """Smallest integer ``(a, b)`` in ``[-bound, bound]**2`` making ``x**a y**b`` an
    integrating factor.

    Candidates are ordered by ``a**2 + b**2``, then ``|a| + |b|``, then
    lexicographically.  Unless ``allow_log`` is set, factors whose potential
    needs ``log x`` or ``log y`` are skipped: those are exactly the ones
    that reduce the problem back to integrating ``dx/x``.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rng = range(-bound, bound + 1)
    pairs = sorted(itertools.product(rng, rng),
                   key=lambda ab: (ab[0] ** 2 + ab[1] ** 2, abs(ab[0]) + abs(ab[1]), ab))
    for pair in pairs:
        if not allow_log and has_log_potential(form, pair):
            continue
        if exactness_check(form, pair):
            return pair
    return None


# -- elastica ----------------------------------------------------------------

def elastica_quadrature(a: float, x: float, tol: float = 1e-12) -> float:
    """``y(x) = integral_0^x t**2 / sqrt(a**4 - t**4) dt`` for ``|x| < a``."""
    a = abs(float(a))
    if not abs(x) < a:
        raise ValueError(f"|x| must be < a (got x={x}, a={a})")
    if x == 0:
        return 0.0
    a4 = a**4

    def integrand(t):
        return t * t / math.sqrt((a4 - t**4))

    ax = abs(x)
    # near the singular endpoint, refine geometrically toward x
    singular = "b" if a - ax < 0.25 * a else None
    value, _ = integrate(integrand, 0.0, ax, tol, singular_end=singular)
    return math.copysign(value, x)
