"""Linear ODEs with constant coefficients.

The equation is ``a0*y + a1*y' + ... + an*y^(n) = X(x)``.  Coefficient
lists are always ascending: ``coeffs[k]`` multiplies the k-th derivative,
and a polynomial ``[c0, c1, c2]`` means ``c0 + c1*x + c2*x**2``.

Complex roots are used internally; every solution handed back to the
caller is in real form (``x**d * exp(a*x) * cos(b*x)`` and friends).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .series import as_scalar, is_exact

CLUSTER_RTOL = 1e-8


class NonPolynomialForcingError(TypeError):
    """The operator expansion of 1/P(D) only terminates on polynomials."""


class SingularBasisError(RuntimeError):
    """The initial-value matrix of a solution basis was singular."""


# -- univariate polynomial helpers (ascending coefficients) -----------------

def _trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_derivative(p: Sequence) -> list:
    if len(p) <= 1:
        return [0 * p[0]] if p else [0]
    return [k * p[k] for k in range(1, len(p))]


def poly_antiderivative(p: Sequence) -> list:
    """Antiderivative with zero constant term."""
    out = [0 * p[0]]
    for k, c in enumerate(p):
        out.append(c / (k + 1) if isinstance(c, Fraction) else c / float(k + 1))
    return out


def poly_eval(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return [(p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)]


def poly_scale(p: Sequence, k) -> list:
    return [k * c for c in p]


def apply_operator(coeffs: Sequence, p: Sequence) -> list:
    """``P(D) p`` for the operator with ascending coefficients ``coeffs``."""
    out = [0 * p[0]] if p else [0]
    deriv = list(p)
    for a in coeffs:
        out = poly_add(out, poly_scale(deriv, a))
        deriv = poly_derivative(deriv)
    return _trim(out)


def _pdivmod(num: list, den: list) -> tuple[list, list]:
    num = _trim(num)
    den = _trim(den)
    if len(num) < len(den):
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - len(den) + 1)
    rem = list(num)
    for k in range(len(quot) - 1, -1, -1):
        q = rem[k + len(den) - 1] / den[-1]
        quot[k] = q
        for j, d in enumerate(den):
            rem[k + j] -= q * d
    return _trim(quot), _trim(rem[: len(den) - 1] or [Fraction(0)])


def _pgcd(p: list, q: list) -> list:
    p, q = _trim(p), _trim(q)
    while not (len(q) == 1 and q[0] == 0):
        p, q = q, _pdivmod(p, q)[1]
    return [c / p[-1] for c in p]


def squarefree_factors(coeffs: Sequence) -> list[tuple[list, int]]:
    """Yun's square-free decomposition over the rationals.

    Returns ``(factor, multiplicity)`` pairs whose product is the input up
    to a constant.  Floating coefficients are converted to the exact
    rationals they represent.
    """
    p = _trim([Fraction(c) for c in coeffs])
    if len(p) < 2:
        return []
    dp = poly_derivative(p)
    a = _pgcd(p, dp)
    b = _pdivmod(p, a)[0]
    c = _pdivmod(dp, a)[0]
    d = poly_add(c, poly_scale(poly_derivative(b), -1))
    out = []
    mult = 1
    while len(_trim(b)) > 1:
        a = _pgcd(b, d)
        if len(a) > 1:
            out.append((a, mult))
        b = _pdivmod(b, a)[0]
        c = _pdivmod(d, a)[0]
        d = poly_add(c, poly_scale(poly_derivative(b), -1))
        mult += 1
    return out


# -- characteristic roots ----------------------------------------------------

@dataclass(frozen=True)
class RootSet:
    roots: tuple  # of (complex value, multiplicity)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self) -> list[complex]:
        """Roots repeated according to multiplicity."""
        return [r for r, m in self.roots for _ in range(m)]


def _companion_roots(p: Sequence[float]) -> np.ndarray:
    p = [float(c) for c in p]
    n = len(p) - 1
    if n == 1:
        return np.array([-p[0] / p[1]], dtype=complex)
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = [-c / p[-1] for c in p[:-1]]
    return np.linalg.eigvals(comp).astype(complex)


def _polish(p: Sequence[float], z: complex, steps: int = 3) -> complex:
    dp = poly_derivative([float(c) for c in p])
    pf = [float(c) for c in p]
    for _ in range(steps):
        d = poly_eval(dp, z)
        if d == 0:
            break
        dz = poly_eval(pf, z) / d
        z = z - dz
        if abs(dz) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def _snap_rational(factor: Sequence[Fraction], z: complex) -> complex:
    # replace a float root by a nearby small-denominator rational that is an exact root
    if abs(z.imag) > CLUSTER_RTOL * max(1.0, abs(z)):
        return z
    guess = Fraction(z.real).limit_denominator(1000)
    if abs(float(guess) - z.real) <= CLUSTER_RTOL * max(1.0, abs(z)) and poly_eval(factor, guess) == 0:
        return complex(float(guess), 0.0)
    return z


def characteristic_roots(coeffs: Sequence) -> RootSet:
    """Roots of ``a0 + a1*z + ... + an*z**n`` with multiplicities.

    Multiplicities come from an exact square-free decomposition, each
    square-free factor is solved through its companion matrix, and roots
    closer than ``1e-8 * max(1, |root|)`` are merged afterwards.
    """
    coeffs = list(coeffs)
    if len(coeffs) < 2:
        raise ValueError("a characteristic polynomial needs degree >= 1")
    if coeffs[-1] == 0:
        raise ValueError("leading coefficient a_n must be nonzero")
    found: list[list] = []
    for factor, mult in squarefree_factors(coeffs):
        scale = max(abs(c) for c in factor)
        fl = [float(c / scale) for c in factor]
        for z in _companion_roots(fl):
            z = _snap_rational(factor, _polish(fl, complex(z)))
            found.append([z, mult])
    # exact conjugate symmetry for real polynomials
    for item in found:
        z = item[0]
        if abs(z.imag) <= CLUSTER_RTOL * max(1.0, abs(z)):
            item[0] = complex(z.real + 0.0, 0.0)
    merged: list[list] = []
    for z, m in sorted(found, key=lambda t: (t[0].real, t[0].imag)):
        for item in merged:
            if abs(item[0] - z) <= CLUSTER_RTOL * max(1.0, abs(z)):
                total = item[1] + m
                item[0] = (item[0] * item[1] + z * m) / total
                item[1] = total
                break
        else:
            merged.append([z, m])
    uppers = [item for item in merged if item[0].imag > 0]
    for item in uppers:
        partner = min((o for o in merged if o[0].imag < 0),
                      key=lambda o: abs(o[0] - item[0].conjugate()))
        mid = (item[0] + partner[0].conjugate()) / 2
        item[0], partner[0] = mid, mid.conjugate()
    merged.sort(key=lambda t: (t[0].real, t[0].imag))
    return RootSet(tuple((complex(z), int(m)) for z, m in merged))


# -- complementary function --------------------------------------------------

@dataclass(frozen=True)
class BasisTerm:
    index: int      # which free constant multiplies this term
    degree: int     # power of x
    rate: float     # exponential rate a
    freq: float     # trig frequency b (0 for real roots)
    kind: str       # "none", "cos" or "sin"

    def derivative(self, x: float, k: int = 0) -> float:
        """k-th derivative of ``x**d * exp(a*x) * {1, cos bx, sin bx}``."""
        lam = complex(self.rate, self.freq)
        d = self.degree
        total = 0j
        for j in range(min(k, d) + 1):
            xpow = x ** (d - j) if d - j else 1.0
            total += (math.comb(k, j) * math.perm(d, j) * xpow * lam ** (k - j))
        total *= cmath.exp(lam * x)
        return total.imag if self.kind == "sin" else total.real

    def label(self) -> str:
        parts = [f"c{self.index + 1}"]
        if self.degree:
            parts.append("x" if self.degree == 1 else f"x^{self.degree}")
        if self.rate:
            parts.append(f"exp({_fmt(self.rate)}x)")
        if self.kind != "none":
            parts.append(f"{self.kind}({_fmt(self.freq)}x)")
        return "*".join(parts)

    def to_json(self) -> dict:
        return {"index": self.index, "degree": self.degree, "rate": self.rate,
                "freq": self.freq, "kind": self.kind}


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


@dataclass(frozen=True)
class ClosedFormSolution:
    """``sum c_k * basis_k(x) + particular(x)`` in real form."""

    terms: tuple
    particular: tuple = (0,)
    constants: tuple | None = None

    @property
    def order(self) -> int:
        return len(self.terms)

    def basis_values(self, x: float, k: int = 0) -> np.ndarray:
        return np.array([t.derivative(x, k) for t in self.terms])

    def particular_derivative(self, x: float, k: int = 0) -> float:
        p = list(self.particular)
        for _ in range(k):
            p = poly_derivative(p)
        return float(poly_eval(p, float(x)))

    def evaluate(self, x: float, k: int = 0, constants=None) -> float:
        """k-th derivative of the solution at ``x``."""
        cs = self.constants if constants is None else constants
        if cs is None:
            raise ValueError("constants are undetermined; call solve_ivp_constants first")
        return float(np.dot(cs, self.basis_values(x, k))) + self.particular_derivative(x, k)

    def __call__(self, x: float) -> float:
        return self.evaluate(x)


def complementary_function(roots: RootSet) -> ClosedFormSolution:
    terms = []
    for z, mult in roots.roots:
        if z.imag < 0:
            continue
        for j in range(mult):
            if z.imag == 0:
                terms.append(BasisTerm(len(terms), j, z.real, 0.0, "none"))
            else:
                terms.append(BasisTerm(len(terms), j, z.real, z.imag, "cos"))
                terms.append(BasisTerm(len(terms), j, z.real, z.imag, "sin"))
    return ClosedFormSolution(tuple(terms))


# -- particular integral -------------------------------------------------------

def _as_poly(forcing) -> list:
    if callable(forcing) or isinstance(forcing, (str, bytes)):
        raise NonPolynomialForcingError(
            "operator inversion needs a polynomial right-hand side; "
            "series like (1 - D + D^2 - ...)(1/x) diverge. "
            "Integrate such equations numerically instead.")
    try:
        coeffs = [as_scalar(c) for c in forcing]
    except TypeError as exc:
        raise NonPolynomialForcingError(f"not a polynomial coefficient list: {forcing!r}") from exc
    if not coeffs:
        return [Fraction(0)]
    return coeffs


def particular_integral_poly(coeffs: Sequence, forcing) -> list:
    """Polynomial particular integral of ``P(D) y = forcing``.

    With ``P(D) = D**m * Q(D)`` and ``Q(0) != 0``, ``1/Q(D)`` is expanded as
    ``(1/Q0) * sum (-R(D))**j`` with ``R = (Q - Q0)/Q0``; the sum stops after
    ``deg + 1`` terms because higher powers of ``D`` annihilate the forcing.
    The result is then integrated ``m`` times with zero constants.
    """
    coeffs = [as_scalar(c) for c in coeffs]
    if len(coeffs) < 2 or coeffs[-1] == 0:
        raise ValueError("need a nonzero leading coefficient and order >= 1")
    x = _as_poly(forcing)
    m = next(k for k, a in enumerate(coeffs) if a != 0)
    q = coeffs[m:]
    q0 = q[0]
    r = [Fraction(0) if is_exact(q0) else 0.0] + [a / q0 for a in q[1:]]
    term = [c / q0 for c in x]
    acc = list(term)
    for _ in range(len(x)):
        term = poly_scale(apply_operator(r, term), -1)
        acc = poly_add(acc, term)
    for _ in range(m):
        acc = poly_antiderivative(acc)
    return _trim(acc)


def solve_ivp_constants(cf: ClosedFormSolution, pi: Sequence, x0: float,
                        values: Sequence[float]) -> ClosedFormSolution:
    """Fix the free constants from ``y(x0), y'(x0), ..., y^(n-1)(x0)``."""
    n = cf.order
    if len(values) != n:
        raise ValueError(f"need {n} initial values, got {len(values)}")
    sol = replace(cf, particular=tuple(pi) if len(pi) else (0,))
    mat = np.array([sol.basis_values(x0, k) for k in range(n)])
    rhs = np.array([float(values[k]) - sol.particular_derivative(x0, k) for k in range(n)])
    if n and np.linalg.cond(mat) > 1e14:
        raise SingularBasisError("initial-value matrix of the basis is singular")
    cs = np.linalg.solve(mat, rhs) if n else np.zeros(0)
    sol = replace(sol, constants=tuple(float(c) for c in cs))
    for k in range(n):
        if abs(sol.evaluate(x0, k) - float(values[k])) > 1e-10 * max(1.0, abs(float(values[k]))):
            raise SingularBasisError("constants do not reproduce the initial data")
    return sol


def solve_const_coeff(coeffs: Sequence, forcing=(0,), x0: float = 0.0,
                      values: Sequence[float] | None = None) -> ClosedFormSolution:
    """Roots, complementary function, particular integral and (optionally) constants."""
    cf = complementary_function(characteristic_roots(coeffs))
    pi = particular_integral_poly(coeffs, forcing)
    if values is None:
        return replace(cf, particular=tuple(pi))
    return solve_ivp_constants(cf, pi, x0, values)


def ode_residual(coeffs: Sequence, sol: ClosedFormSolution, x: float,
                 forcing: Sequence = (0,)) -> float:
    """``P(D) y - X`` at ``x`` using closed-form derivatives."""
    lhs = sum(float(a) * sol.evaluate(x, k) for k, a in enumerate(coeffs))
    return lhs - float(poly_eval([float(c) for c in forcing], float(x)))


# -- order reduction by an exponential factor --------------------------------

@dataclass(frozen=True)
class ReducedFirstOrder:
    """``y' + A*y = g(x) + exp(alpha*(x0 - x)) * (y'(x0) - alpha*y(x0))``.

    Obtained from ``y'' + k*y = X`` by multiplying with ``exp(alpha*x)``,
    ``alpha**2 = -k``, and integrating once from ``x0``.
    """

    alpha: complex
    x0: float
    forcing: tuple = field(default=(0,))

    @property
    def A(self):
        return -self.alpha

    def _S(self, t):
        # antiderivative of exp(alpha t) X(t) is exp(alpha t) * S(t)
        p = [complex(c) for c in self.forcing]
        total = 0j
        j = 0
        while p and any(c != 0 for c in p):
            total += (-1) ** j * poly_eval(p, t) / self.alpha ** (j + 1)
            p = poly_derivative(p) if len(p) > 1 else []
            j += 1
        return total

    def g(self, x: float):
        """``exp(-alpha x) * integral_{x0}^{x} exp(alpha t) X(t) dt`` in closed form."""
        val = self._S(x) - cmath.exp(self.alpha * (self.x0 - x)) * self._S(self.x0)
        return _real_if_close(val)

    def rhs(self, x: float, y0: float, yp0: float):
        """Right-hand side of the reduced equation for the branch through (y0, yp0)."""
        val = self.g(x) + cmath.exp(self.alpha * (self.x0 - x)) * (yp0 - self.alpha * y0)
        return _real_if_close(val)

    def identity_residual(self, x: float, y: float, yp: float, y0: float, yp0: float):
        """``y' + A y - rhs`` for a candidate solution value/derivative at ``x``."""
        return abs(yp + self.A * y - self.rhs(x, y0, yp0))


def _real_if_close(z: complex):
    z = complex(z)
    return z.real if abs(z.imag) <= 1e-15 * max(1.0, abs(z.real)) else z


def reduce_order_exponential(k: float, forcing: Sequence = (0,), x0: float = 0.0) -> ReducedFirstOrder:
    if k == 0:
        raise ValueError("k must be nonzero")
    k = float(k)
    alpha = complex(math.sqrt(-k)) if k < 0 else complex(0.0, math.sqrt(k))
    return ReducedFirstOrder(alpha, float(x0), tuple(float(c) for c in forcing) or (0.0,))


# -- divergent operator series ------------------------------------------------

@dataclass(frozen=True)
class DivergenceTable:
    x: float
    terms: tuple
    partial_sums: tuple
    min_term_index: int

    def to_json(self) -> dict:
        return {"x": self.x, "min_term_index": self.min_term_index,
                "rows": [{"n": n, "term": t, "partial_sum": s}
                         for n, (t, s) in enumerate(zip(self.terms, self.partial_sums))]}


def _to_float(q: Fraction) -> float:
    try:
        return float(q)
    except OverflowError:
        return math.copysign(math.inf, q)


def divergent_pi_demo(x: float, n_max: int) -> DivergenceTable:
    """Terms ``n!/x**(n+1)`` of the formal particular integral of ``y' + y = 1/x``.

    The term ratio is ``(n+1)/x``, so the terms grow without bound once
    ``n + 1 > x``: there is no solution here, only a table.
    """
    if x == 0:
        raise ValueError("x must be nonzero")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xq = Fraction(x)
    term = 1 / xq
    terms, sums = [], []
    total = Fraction(0)
    for n in range(n_max):
        total += term
        terms.append(term)
        sums.append(total)
        term = term * (n + 1) / xq
    smallest = min(range(n_max), key=lambda n: abs(terms[n]))
    return DivergenceTable(float(x), tuple(_to_float(t) for t in terms),
                           tuple(_to_float(s) for s in sums), smallest)
