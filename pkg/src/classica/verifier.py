"""Residual checks for proposed solutions, spliced solutions and singular solutions.

Candidates carry their own analytic derivatives, so residuals are computed
by substitution, never by differencing.  With :class:`~fractions.Fraction`
grid points and polynomial candidates the residuals are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence


class DerivativeUnavailableError(ValueError):
    """The candidate does not supply enough derivatives for the equation."""


@dataclass(frozen=True)
class ImplicitODE:
    """``F(x, y, y') = 0`` (order 1) or ``F(x, y, y', y'') = 0`` (order 2)."""

    F: Callable
    order: int = 1
    name: str = ""


@dataclass(frozen=True)
class Candidate:
    """A proposed solution: ``derivs[k]`` is the k-th derivative as a callable."""

    derivs: tuple
    name: str = ""

    def __call__(self, x):
        return self.derivs[0](x)

    def derivative(self, x, k: int = 1):
        if k >= len(self.derivs):
            raise DerivativeUnavailableError(f"candidate {self.name!r} has no derivative of order {k}")
        return self.derivs[k](x)


def residual_at(ode: ImplicitODE, cand: Candidate, x):
    if len(cand.derivs) < ode.order + 1:
        raise DerivativeUnavailableError(
            f"{ode.name or 'equation'} needs {ode.order} derivatives, "
            f"candidate {cand.name!r} has {len(cand.derivs) - 1}")
    return ode.F(x, *(d(x) for d in cand.derivs[: ode.order + 1]))


def residual_max(ode: ImplicitODE, cand: Candidate, grid: Sequence):
    """Largest ``|F|`` over the grid (exact when the arithmetic is)."""
    return max(abs(residual_at(ode, cand, x)) for x in grid)


# -- presets -----------------------------------------------------------------

def parabola_ode() -> ImplicitODE:
    """``(y')**2 = 4y``."""
    return ImplicitODE(lambda x, y, yp: yp * yp - 4 * y, 1, "(y')^2 = 4y")


def taylor_ode() -> ImplicitODE:
    """Taylor's equation ``(1 + x**2)**2 (y')**2 = 4y**3 - 4y**2``.

    This is the form reached by the substitution ``y = u**-2 (1 + x**2)``
    and satisfied by the family ``(1 + x**2) / (a x + sqrt(1 - a**2))**2``.
    """
    return ImplicitODE(lambda x, y, yp: (1 + x * x) ** 2 * yp * yp - (4 * y**3 - 4 * y**2),
                       1, "Taylor 1715")


def taylor_ode_as_printed() -> ImplicitODE:
    """The variant with ``(1 + x)**2``; the general family does *not* solve it."""
    return ImplicitODE(lambda x, y, yp: (1 + x) ** 2 * yp * yp - (4 * y**3 - 4 * y**2),
                       1, "Taylor 1715, (1+x)^2 variant")


def zero_candidate() -> Candidate:
    return Candidate((lambda x: 0 * x, lambda x: 0 * x, lambda x: 0 * x), "zero")


def constant_candidate(value) -> Candidate:
    return Candidate((lambda x: 0 * x + value, lambda x: 0 * x, lambda x: 0 * x), f"const({value})")


def parabola_candidate(c) -> Candidate:
    """``y = (x - c)**2``."""
    return Candidate((lambda x: (x - c) ** 2, lambda x: 2 * (x - c), lambda x: 0 * x + 2),
                     f"(x-{c})^2")


def taylor_general(a: float) -> Candidate:
    """``y = (1 + x**2) / (a x + sqrt(1 - a**2))**2`` with its exact derivatives."""
    s = math.sqrt(1.0 - a * a)

    def y(x):
        return (1 + x * x) / (a * x + s) ** 2

    def yp(x):
        d = a * x + s
        return (2 * x * d - 2 * a * (1 + x * x)) / d**3

    def ypp(x):
        d = a * x + s
        num = 2 * x * d - 2 * a * (1 + x * x)
        dnum = 2 * d + 2 * a * x - 4 * a * x
        return (dnum * d - 3 * a * num) / d**4

    return Candidate((y, yp, ypp), f"taylor-general({a})")


def exp_candidate(scale: float = 1.0) -> Candidate:
    f = lambda x: scale * math.exp(x)  # noqa: E731
    return Candidate((f, f, f), f"{scale}*exp(x)")


# -- spliced solutions ---------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseCandidate:
    """Three pieces on ``(-inf, c1]``, ``(c1, c2]``, ``(c2, inf)``.

    A knot belongs to the piece on its left.  Knots may be infinite.
    """

    c1: object
    c2: object
    pieces: tuple  # (left, middle, right) Candidates

    def __post_init__(self):
        if self.c1 > self.c2:
            raise ValueError("need c1 <= c2")

    def piece_for(self, x) -> Candidate:
        if x <= self.c1:
            return self.pieces[0]
        if x <= self.c2:
            return self.pieces[1]
        return self.pieces[2]


def splice_candidate(c1, c2) -> PiecewiseCandidate:
    """``(x - c1)**2`` left of ``c1``, 0 in between, ``(x - c2)**2`` right of ``c2``."""
    return PiecewiseCandidate(c1, c2, (parabola_candidate(c1), zero_candidate(),
                                       parabola_candidate(c2)))


class GlueReport(NamedTuple):
    knot: object
    value_gap: object
    derivative_gap: object


class PiecewiseResult(NamedTuple):
    max_residual: object
    glue: list

    @property
    def max_glue_gap(self):
        return max((max(g.value_gap, g.derivative_gap) for g in self.glue), default=0)


def residual_piecewise(ode: ImplicitODE, cand: PiecewiseCandidate, grid: Sequence) -> PiecewiseResult:
    worst = max(abs(residual_at(ode, cand.piece_for(x), x)) for x in grid)
    glue = []
    left, mid, right = cand.pieces
    for knot, a, b in ((cand.c1, left, mid), (cand.c2, mid, right)):
        if isinstance(knot, float) and math.isinf(knot):
            continue
        glue.append(GlueReport(knot, abs(a(knot) - b(knot)),
                               abs(a.derivative(knot) - b.derivative(knot))))
    return PiecewiseResult(worst, glue)


# -- non-uniqueness and envelopes ---------------------------------------------

class WitnessEntry(NamedTuple):
    name: str
    through_point: bool
    residual: float
    passes: bool


class WitnessResult(NamedTuple):
    nonunique: bool
    entries: list
    distinct_pair: tuple | None


def nonuniqueness_witness(ode: ImplicitODE, candidates: Sequence[Candidate], point: tuple,
                          tol: float = 1e-9, radius: float = 0.1, samples: int = 11) -> WitnessResult:
    """Do two distinct solutions pass through ``point``?

    A candidate passes when it goes through the point within ``tol`` and its
    residual on ``[x* - radius, x* + radius]`` is at most ``tol``.  Two
    passing candidates are distinct germs when their slopes at ``x*``, or
    their values somewhere on the punctured neighbourhood, differ by more
    than ``10 * tol``.
    """
    if len(candidates) < 2:
        raise ValueError("need at least two candidates")
    xs, ys = point
    nbhd = [xs - radius + 2 * radius * k / (samples - 1) for k in range(samples)]
    punctured = [x for x in nbhd if x != xs]
    entries = []
    passing = []
    for cand in candidates:
        through = abs(cand(xs) - ys) <= tol
        res = float(residual_max(ode, cand, nbhd))
        ok = through and res <= tol
        entries.append(WitnessEntry(cand.name, through, res, ok))
        if ok:
            passing.append(cand)
    for i in range(len(passing)):
        for j in range(i + 1, len(passing)):
            p, q = passing[i], passing[j]
            slope_gap = abs(p.derivative(xs) - q.derivative(xs))
            value_gap = max(abs(p(x) - q(x)) for x in punctured)
            if slope_gap > 10 * tol or value_gap > 10 * tol:
                return WitnessResult(True, entries, (p.name, q.name))
    return WitnessResult(False, entries, None)


class EnvelopeResult(NamedTuple):
    is_envelope: bool
    reason: str
    contacts: list  # (x, c, value_gap, slope_gap)


def _golden_min(fun, lo: float, hi: float, iters: int = 200) -> float:
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if abs(b - a) <= 1e-15 * max(1.0, abs(a)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fun(d)
    return c if fc <= fd else d


def envelope_check(family: Callable, ode: ImplicitODE, c_samples: Sequence[float],
                   x_grid: Sequence[float], singular: Candidate, tol: float = 1e-8) -> EnvelopeResult:
    """Is ``singular`` tangent to some member ``family(c)`` at every grid point?

    ``family(c)`` returns a :class:`Candidate`.  Both the sampled members and
    the singular candidate must solve the equation to ``tol`` first.
    """
    c_samples = sorted(c_samples)
    for c in c_samples:
        if residual_max(ode, family(c), x_grid) > tol:
            return EnvelopeResult(False, f"family member c={c} is not a solution", [])
    if residual_max(ode, singular, x_grid) > tol:
        return EnvelopeResult(False, "singular candidate is not a solution", [])
    contacts = []
    for x in x_grid:
        ys, dys = singular(x), singular.derivative(x)

        def mismatch(c):
            m = family(c)
            return abs(m(x) - ys) + abs(m.derivative(x) - dys)

        scores = [mismatch(c) for c in c_samples]
        k = min(range(len(c_samples)), key=scores.__getitem__)
        lo = c_samples[max(k - 1, 0)]
        hi = c_samples[min(k + 1, len(c_samples) - 1)]
        best = _golden_min(mismatch, lo, hi) if hi > lo else c_samples[k]
        if mismatch(c_samples[k]) < mismatch(best):
            best = c_samples[k]
        m = family(best)
        vgap, sgap = abs(m(x) - ys), abs(m.derivative(x) - dys)
        contacts.append((x, best, vgap, sgap))
        if vgap > tol or sgap > tol:
            return EnvelopeResult(False, f"no tangent member at x={x}", contacts)
    return EnvelopeResult(True, "tangent at every sampled point", contacts)
