"""Truncated power series and sparse bivariate polynomials.

A :class:`TruncatedSeries` holds the coefficients ``c0..cN`` of

    s(x) = c0 + c1*(x - x0) + ... + cN*(x - x0)**N

about the expansion point ``x0``.  Coefficients above ``N`` are *unknown*,
not zero, so binary operations return a series at the smaller of the two
operand orders.  A series is either exact (every coefficient is a
:class:`fractions.Fraction`) or floating; integers are promoted to
fractions, so a series built from integers and fractions stays exact under
every operation in this module.
"""

from __future__ import annotations

import json
import math
import numbers
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

DEFAULT_ORDER = 16


def default_order() -> int:
    """Series truncation order, overridable with ``CLASSICA_DEFAULT_ORDER``."""
    value = os.environ.get("CLASSICA_DEFAULT_ORDER")
    if value is None or value.strip() == "":
        return DEFAULT_ORDER
    order = int(value)
    if order < 1:
        raise ValueError(f"CLASSICA_DEFAULT_ORDER must be >= 1, got {order}")
    return order


def is_exact(value) -> bool:
    return isinstance(value, numbers.Rational) and not isinstance(value, bool)


def as_scalar(value):
    """Promote integers to Fraction; leave floats and complex numbers alone."""
    if isinstance(value, bool):
        return Fraction(int(value))
    if is_exact(value):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, numbers.Real):
        return float(value)
    if isinstance(value, numbers.Complex):
        return complex(value)
    raise TypeError(f"not a scalar: {value!r}")


def _uniform(values: Iterable) -> tuple:
    values = [as_scalar(v) for v in values]
    if all(isinstance(v, Fraction) for v in values):
        return tuple(values)
    if any(isinstance(v, complex) for v in values):
        return tuple(complex(v) for v in values)
    return tuple(float(v) for v in values)


def parse_scalar(text: str):
    """Parse ``"3"``, ``"-1/45"`` or ``"0.25"``; integers and p/q stay exact."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(text))
    except ValueError:
        return float(text)


def scalar_to_json(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    return float(value)


@dataclass(frozen=True)
class TruncatedSeries:
    center: object
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a series needs at least one coefficient")
        object.__setattr__(self, "coeffs", _uniform(self.coeffs))
        object.__setattr__(self, "center", as_scalar(self.center))

    @classmethod
    def constant(cls, value, order: int, center=0) -> "TruncatedSeries":
        value = as_scalar(value)
        zero = Fraction(0) if isinstance(value, Fraction) else 0.0 * value
        return cls(center, (value,) + (zero,) * order)

    @classmethod
    def variable(cls, order: int, center=0) -> "TruncatedSeries":
        """The series of ``x`` itself about ``center``."""
        c = as_scalar(center)
        coeffs = [c, 1] + [0] * (order - 1)
        return cls(c, tuple(coeffs[: order + 1]))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.center, self.coeffs[: order + 1])

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        return series_linear_combine(1, self, 1, _lift(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return series_linear_combine(1, self, -1, _lift(other, self))

    def __rsub__(self, other):
        return series_linear_combine(-1, self, 1, _lift(other, self))

    def __neg__(self):
        return series_linear_combine(-1, self, 0, self)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return series_linear_combine(other, self, 0, self)

    __rmul__ = __mul__

    def __call__(self, x):
        return series_eval(self, x)

    def to_json(self) -> dict:
        return {"center": scalar_to_json(self.center),
                "coeffs": [scalar_to_json(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "TruncatedSeries":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(as_scalar(data["center"]), tuple(as_scalar(c) for c in data["coeffs"]))


def _lift(other, like: TruncatedSeries) -> TruncatedSeries:
    if isinstance(other, TruncatedSeries):
        return other
    return TruncatedSeries.constant(other, like.order, like.center)


def _check_center(s: TruncatedSeries, t: TruncatedSeries) -> None:
    if s.center != t.center:
        raise ValueError(f"series centers differ: {s.center} != {t.center}")


def series_linear_combine(a, s: TruncatedSeries, b, t: TruncatedSeries) -> TruncatedSeries:
    """``a*s + b*t`` at order ``min(s.order, t.order)``."""
    _check_center(s, t)
    a, b = as_scalar(a), as_scalar(b)
    n = min(s.order, t.order)
    return TruncatedSeries(s.center, tuple(a * s[k] + b * t[k] for k in range(n + 1)))


def series_mul(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(s.order, t.order)``."""
    _check_center(s, t)
    n = min(s.order, t.order)
    out = []
    for k in range(n + 1):
        acc = s[0] * t[k]
        for j in range(1, k + 1):
            acc = acc + s[j] * t[k - j]
        out.append(acc)
    return TruncatedSeries(s.center, tuple(out))


def series_differentiate(s: TruncatedSeries) -> TruncatedSeries:
    if s.order < 1:
        raise ValueError("cannot differentiate a series of order 0")
    return TruncatedSeries(s.center, tuple(k * s[k] for k in range(1, s.order + 1)))


def series_antiderivative(s: TruncatedSeries, constant=0) -> TruncatedSeries:
    """Term-by-term integral from the center; the result has order + 1."""
    constant = as_scalar(constant)
    if s.exact and isinstance(constant, Fraction):
        body = tuple(c / (k + 1) for k, c in enumerate(s.coeffs))
    else:
        body = tuple(c / float(k + 1) for k, c in enumerate(s.coeffs))
    return TruncatedSeries(s.center, (constant,) + body)


def series_eval(s: TruncatedSeries, x):
    """Horner evaluation at ``x - center``.

    Exact input gives an exact result.  In floating mode the Horner sum is
    carried out on the exact binary values and rounded once, so the result
    is correctly rounded.
    """
    x = as_scalar(x)
    if isinstance(x, Fraction) and s.exact:
        return _horner(s.coeffs, x - s.center)
    if isinstance(x, complex) or any(isinstance(c, complex) for c in s.coeffs):
        return _horner(s.coeffs, x - s.center)
    values = list(s.coeffs) + [x, s.center]
    if not all(math.isfinite(v) for v in values):
        return _horner(s.coeffs, x - s.center)
    h = Fraction(x) - Fraction(s.center)
    return float(_horner([Fraction(c) for c in s.coeffs], h))


def _horner(coeffs: Sequence, h):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * h + c
    return acc


@dataclass(frozen=True)
class BivariatePolynomial:
    """Sparse polynomial ``sum c * x**i * y**j`` with nonnegative exponents."""

    terms: Mapping

    def __post_init__(self):
        merged: dict = {}
        items = self.terms.items() if isinstance(self.terms, Mapping) else self.terms
        for key, coef in items:
            i, j = (int(e) for e in key)
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term {(i, j)}")
            merged[(i, j)] = merged.get((i, j), 0) + as_scalar(coef)
        clean = {k: v for k, v in sorted(merged.items()) if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, triples: Iterable) -> "BivariatePolynomial":
        """Build from ``(i, j, coef)`` triples; duplicates are summed."""
        return cls([((i, j), c) for i, j, c in triples])

    @classmethod
    def zero(cls) -> "BivariatePolynomial":
        return cls({})

    def __iter__(self):
        for (i, j), c in self.terms.items():
            yield i, j, c

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, BivariatePolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def __call__(self, x, y):
        total = 0
        for (i, j), c in self.terms.items():
            total = total + c * x**i * y**j
        return total

    def partial_x(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})

    def partial_y(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        return BivariatePolynomial(list(self.terms.items()) + list(other.terms.items()))

    def scale(self, k) -> "BivariatePolynomial":
        k = as_scalar(k)
        return BivariatePolynomial({key: k * c for key, c in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def to_json(self) -> list:
        return [{"i": i, "j": j, "c": scalar_to_json(c)} for (i, j), c in self.terms.items()]

    @classmethod
    def from_json(cls, data) -> "BivariatePolynomial":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_terms((int(t["i"]), int(t["j"]), as_scalar(t["c"])) for t in data)


def substitute_series(p: BivariatePolynomial, y: TruncatedSeries) -> TruncatedSeries:
    """Series of ``x -> p(x, y(x))`` about ``y.center`` at ``y.order``."""
    n = y.order
    x = TruncatedSeries.variable(n, y.center)
    if not y.exact:
        x = TruncatedSeries(x.center, tuple(float(c) for c in x.coeffs))
    max_i = max((i for i, _ in p.terms), default=0)
    max_j = max((j for _, j in p.terms), default=0)
    one = TruncatedSeries.constant(1 if y.exact else 1.0, n, y.center)
    xpow = [one]
    for _ in range(max_i):
        xpow.append(series_mul(xpow[-1], x))
    ypow = [one]
    for _ in range(max_j):
        ypow.append(series_mul(ypow[-1], y))
    total = TruncatedSeries.constant(0 if y.exact else 0.0, n, y.center)
    for (i, j), c in p.terms.items():
        total = series_linear_combine(1, total, c, series_mul(xpow[i], ypow[j]))
    return total
