"""End-to-end reproduction run: every historical worked example as a named check."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import first_order as fo
from . import hypergeom as hg
from . import linear_const as lc
from . import phase_plane as pp
from . import second_order as so
from . import verifier as vf
from .newton import SeriesIVP, cross_validate_rk4, newton_example_rhs, solve_series_ivp
from .series import BivariatePolynomial, scalar_to_json


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    actual: object
    tolerance: object
    passed: bool
    provenance: str


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, expected, actual, tolerance, passed, provenance) -> None:
        self.checks.append(Check(name, expected, actual, tolerance, bool(passed), provenance))

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "ok": self.ok,
            "checks": [
                {"name": c.name, "expected": c.expected, "actual": c.actual,
                 "tolerance": c.tolerance, "pass": c.passed, "provenance": c.provenance}
                for c in self.checks
            ],
        }

    def table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=10)
        lines = [f"{'check':<{width}}  {'result':<6}  {'actual':>24}  tolerance"]
        for c in self.checks:
            lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  "
                         f"{_short(c.actual):>24}  {_short(c.tolerance)}")
        status = "all checks passed" if self.ok else (
            f"{sum(not c.passed for c in self.checks)} of {len(self.checks)} checks FAILED")
        lines.append(f"-- {status} ({self.elapsed:.1f} s)")
        return "\n".join(lines)


def _short(v) -> str:
    if isinstance(v, float):
        return format(v, ".3g")
    if isinstance(v, (list, tuple)):
        s = "[" + ", ".join(_short(x) for x in v) + "]"
        return s if len(s) <= 40 else s[:37] + "..."
    return str(v)


DEFAULT_FIXTURES = {
    "newton_order": 6,
    "newton_expected": ["0", "1", "-1", "1/3", "-1/6", "1/30", "-1/45"],
    "const_coeffs": (2, -3, 1),
    "const_rhs": (1, 1),
    "const_roots": (1, 2),
    "const_pi": ("5/4", "1/2"),
    "divergence_x": 10,
    "ifactor_forms": (
        ("2y dx - x dy", {(0, 1): 2}, {(1, 0): -1}, (1, -2)),
        ("-y dx + 3x dy", {(0, 1): -1}, {(1, 0): 3}, (-2, 2)),
    ),
    "catenary_a": 1.0,
    "volterra": (1, 1, 1, 1),
}


def _check_newton(m: RunManifest, fx) -> None:
    y = solve_series_ivp(SeriesIVP(newton_example_rhs(), 0, 0, fx["newton_order"]))
    got = [str(scalar_to_json(c)) for c in y.coeffs]
    m.add("newton series coefficients (exact)", fx["newton_expected"], got, 0,
          got == list(fx["newton_expected"]), "Newton's y' = 1 - 3x + y + x^2 + xy, y(0)=0")
    cv = cross_validate_rk4(SeriesIVP(newton_example_rhs(), 0, 0, 10), 0.1, 1e-3)
    m.add("newton series vs RK4 at x=0.1", 0.0, cv.gap, 1e-8, cv.gap <= 1e-8, "oracle: RK4")
    rc = so.recast_first_order(newton_example_rhs(), 0, 0)
    traj = so.integrate_second_order(rc, 0.1, 1e-3)
    gap = abs(traj.y[-1] - cv.series_value)
    m.add("newton series vs second-order recast", 0.0, gap, 1e-8, gap <= 1e-8, "oracle: RK4 on y''")


def _check_const(m: RunManifest, fx) -> None:
    coeffs, rhs = fx["const_coeffs"], fx["const_rhs"]
    roots = sorted(r.real for r in lc.characteristic_roots(coeffs).values())
    ok = len(roots) == len(fx["const_roots"]) and all(
        abs(a - b) <= 1e-12 for a, b in zip(roots, fx["const_roots"]))
    m.add("characteristic roots of D^2-3D+2", list(fx["const_roots"]), roots, 1e-12, ok,
          "operator calculus worked example")
    pi = lc.particular_integral_poly(coeffs, rhs)
    want = [Fraction(s) for s in fx["const_pi"]]
    m.add("particular integral x/2 + 5/4 (exact)", [str(scalar_to_json(v)) for v in want],
          [str(scalar_to_json(v)) for v in pi], 0, pi == want, "operator inversion 1/P(D)")
    sol = lc.solve_const_coeff(coeffs, rhs, 0.0, (1.0, 0.0))
    res = max(abs(lc.ode_residual(coeffs, sol, x, rhs)) for x in np.linspace(0, 1, 100))
    m.add("closed-form solution residual on [0,1]", 0.0, res, 1e-10, res <= 1e-10,
          "oracle: substitution")
    traj = so.integrate_second_order(
        so.linear_ivp(lambda x: float(coeffs[1]) / coeffs[2], lambda x: float(coeffs[0]) / coeffs[2],
                      lambda x: (rhs[0] + rhs[1] * x) / coeffs[2], 0.0, 1.0, 0.0), 1.0, 1e-3)
    gap = abs(traj.y[-1] - sol(1.0))
    m.add("closed form vs RK4 at x=1", 0.0, gap, 1e-8, gap <= 1e-8, "oracle: RK4")


def _check_divergence(m: RunManifest, fx) -> None:
    try:
        lc.particular_integral_poly((1, 1), lambda x: 1 / x)
        rejected = False
    except lc.NonPolynomialForcingError:
        rejected = True
    m.add("non-polynomial forcing rejected", True, rejected, None, rejected, "divergence contract")
    tab = lc.divergent_pi_demo(fx["divergence_x"], 51)
    mono = all(tab.terms[n + 1] >= tab.terms[n] for n in range(10, 50))
    m.add("terms n!/x^(n+1) grow for n >= 10", True, mono, None, mono, "ratio (n+1)/x")
    s50 = tab.partial_sums[50]
    m.add("partial sum at n=50 exceeds 1e10", ">1e10", s50, None, s50 > 1e10, "exact Fraction sum")


def _check_separable(m: RunManifest, fx) -> None:
    y = fo.solve_separable(fo.separable_preset("leibniz"), 0.0, 0.0, 1.5)
    m.add("leibniz dy/dx = x", 1.125, y, 1e-10, abs(y - 1.125) <= 1e-10, "y = x^2/2")
    y = fo.solve_separable(fo.separable_preset("isochrone", a=1.0, b=1.0), 0.0, 2.0, 1.0)
    exact = 1.0 + 2.5 ** (2.0 / 3.0)
    m.add("isochrone dy/dx = sqrt(a/(by-a))", exact, y, 1e-9, abs(y - exact) <= 1e-9,
          "(2/3)(y-1)^(3/2) = x + 2/3")
    a = fx["catenary_a"]
    p = fo.solve_separable(fo.separable_preset("catenary-p", a=a), 0.0, 0.0, 1.0)
    m.add("catenary slope p(1) = sinh(a)", math.sinh(a), p, 1e-9, abs(p - math.sinh(a)) <= 1e-9,
          "dp/sqrt(1+p^2) = a dx")
    e = fo.elastica_quadrature(1.0, 0.5)
    m.add("elastica y(0.5), a=1", 0.042242012906117864, e, 1e-12,
          abs(e - 0.042242012906117864) <= 1e-12, "oracle: mpmath quad")


def _check_ifactor(m: RunManifest, fx) -> None:
    for label, mterms, nterms, want in fx["ifactor_forms"]:
        form = fo.DifferentialForm(BivariatePolynomial(mterms), BivariatePolynomial(nterms))
        got = fo.find_monomial_integrating_factor(form)
        ok = got == tuple(want) and fo.exactness_check(form, got)
        m.add(f"integrating factor for {label}", list(want), list(got) if got else None, None, ok,
              "monomial factor search")


def _check_singular(m: RunManifest, fx) -> None:
    ode = vf.parabola_ode()
    rng = random.Random(1715)
    worst = Fraction(0)
    for _ in range(20):
        c = Fraction(rng.randint(-50, 50), rng.randint(1, 9))
        c1, c2 = sorted(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(2))
        grid = [Fraction(k, 4) - 15 for k in range(121)]
        worst = max(worst, vf.residual_max(ode, vf.parabola_candidate(c), grid),
                    vf.residual_max(ode, vf.zero_candidate(), grid))
        res = vf.residual_piecewise(ode, vf.splice_candidate(c1, c2), grid)
        worst = max(worst, res.max_residual, res.max_glue_gap)
    m.add("(y')^2=4y: (x-c)^2, 0 and splices (exact)", 0, str(worst), 0, worst == 0,
          "general, singular and spliced solutions")
    w = vf.nonuniqueness_witness(ode, [vf.zero_candidate(), vf.parabola_candidate(3)], (3, 0))
    m.add("non-uniqueness at (3, 0)", True, w.nonunique, None, w.nonunique, "two solutions through a point")
    grid = [k / 20 for k in range(21)]
    r1 = float(vf.residual_max(vf.taylor_ode(), vf.constant_candidate(1), grid))
    m.add("Taylor equation, y = 1", 0.0, r1, 1e-10, r1 <= 1e-10, "singular solution")
    r2 = float(vf.residual_max(vf.taylor_ode(), vf.taylor_general(0.5), grid))
    m.add("Taylor equation, general solution a=0.5", 0.0, r2, 1e-10, r2 <= 1e-10, "general solution")


def _check_catenary(m: RunManifest, fx) -> None:
    a = fx["catenary_a"]
    traj = so.integrate_second_order(so.catenary_ivp(a), 2.0, 1e-3)
    err = float(np.max(np.abs(traj.y - np.cosh(a * traj.grid) / a)))
    m.add("catenary RK4 vs cosh(ax)/a on [0,2]", 0.0, err, 1e-8, err <= 1e-8, "hanging chain")
    traj = so.integrate_second_order(so.bernoulli1716_ivp(), 2.0, 1e-3)
    err = abs(traj.y[-1] - 4.0)
    m.add("y'' = 2y/x^2 gives y = x^2", 0.0, err, 1e-8, err <= 1e-8, "Bernoulli 1716")


def _check_wronskian(m: RunManifest, fx) -> None:
    P, Q = (lambda x: x), (lambda x: 1.0)
    t1 = so.integrate_second_order(so.linear_ivp(P, Q, alpha=1.0, beta=0.0), 2.0, 1e-3)
    t2 = so.integrate_second_order(so.linear_ivp(P, Q, alpha=0.0, beta=1.0), 2.0, 1e-3)
    rep = so.abel_check(P, t1, t2, 1e-5)
    m.add("Abel: max |W' + xW| for y''+xy'+y=0", 0.0, rep.deviation, 1e-5, rep.passed, "W = c exp(-int P)")
    zero = lambda x: 0.0  # noqa: E731
    one = lambda x: 1.0  # noqa: E731
    c = so.integrate_second_order(so.linear_ivp(zero, one, alpha=1.0, beta=0.0), 2.0, 1e-3)
    s = so.integrate_second_order(so.linear_ivp(zero, one, alpha=0.0, beta=1.0), 2.0, 1e-3)
    dev = float(np.max(np.abs(so.wronskian_of(c, s) - 1.0)))
    m.add("W(cos, sin) = 1", 0.0, dev, 1e-9, dev <= 1e-9, "y'' + y = 0")


def _check_hypergeom(m: RunManifest, fx) -> None:
    for abc in ((1, 1, 2), (Fraction(1, 2), Fraction(1, 2), Fraction(3, 2))):
        r = hg.equation_residual(*abc, 12)
        m.add(f"Gauss equation residual ({', '.join(str(v) for v in abc)}) (exact)", 0, str(r), 0, r == 0,
              "coefficient recurrence")
    for row in hg.run_identity_suite():
        m.add(f"identity: {row.name}", 0.0, row.gap, row.tol, row.passed, "elementary-function table")
    g4, g5 = hg.limit_identity_gap("exp", 0.5, 1e4), hg.limit_identity_gap("exp", 0.5, 1e5)
    ratio = g4 / g5
    m.add("exp limit gap decay B=1e4 -> 1e5", 10.0, ratio, "[5, 20]", 5 <= ratio <= 20, "O(1/B) decay")


def _check_volterra(m: RunManifest, fx) -> None:
    params = fx["volterra"]
    sysv = pp.volterra_system(*params)
    pts = pp.find_critical_points(sysv, (-1, 3, -1, 3))
    kinds = {f"({p[0]}, {p[1]})": pp.classify_point(sysv, p).kind.value for p in pts}
    want = {"(0, 0)": "Saddle", "(1, 1)": "Center"}
    m.add("Volterra critical points", want, kinds, None, kinds == want, "prey-predator model")
    if (1, 1) in pts:
        tr = pp.linearize(sysv, (1, 1)).trace
        m.add("trace at (1,1) is exactly 0", "0", str(tr), 0, tr == 0, "exact Jacobian")
    fixtures = {"Center": (0, 1, -1, 0), "NodeEqual": (1, 0, 0, 1), "Saddle": (1, 0, 0, -1),
                "Spiral": (-1, 1, -1, -1), "NodeDistinct": (-1, 0, 0, -2)}
    got = {k: pp.classify_linear(pp.LinearSystemCoeffs(*v)).kind.value for k, v in fixtures.items()}
    m.add("five linear classes", list(fixtures), list(got.values()), None,
          all(k == v for k, v in got.items()), "characteristic quadratic")
    d1 = pp.volterra_invariant(params, pp.integrate_path(sysv, (2.0, 1.0), 1e-3, 20.0))
    d2 = pp.volterra_invariant(params, pp.integrate_path(sysv, (2.0, 1.0), 2e-3, 20.0))
    m.add("Volterra invariant drift, dt=1e-3, t<=20", 0.0, d1, 1e-6, d1 <= 1e-6, "H conserved")
    m.add("drift growth when dt doubles", 16.0, d2 / d1, "[12, 20]", 12 <= d2 / d1 <= 20,
          "RK4 order 4")
    bundle = pp.phase_portrait(sysv, (0.5, 2.5, 0.5, 2.5), 3, 1e-2, 10.0)
    closure = max(pp.volterra_invariant(params, p.path) for p in bundle.paths)
    m.add("portrait: 9 seeds x 2 directions, H drift", 18, len(bundle.paths), 1e-6,
          len(bundle.paths) == 18 and closure <= 1e-6, "closed orbits")


CHECKS: list[tuple[str, Callable]] = [
    ("newton", _check_newton),
    ("const-ode", _check_const),
    ("divergence", _check_divergence),
    ("separable", _check_separable),
    ("ifactor", _check_ifactor),
    ("singular", _check_singular),
    ("catenary", _check_catenary),
    ("wronskian", _check_wronskian),
    ("hypergeom", _check_hypergeom),
    ("volterra", _check_volterra),
]


def run_demo(fixtures: dict | None = None) -> RunManifest:
    """Run every check in a fixed order; ``fixtures`` overrides default inputs."""
    fx = dict(DEFAULT_FIXTURES)
    fx.update(fixtures or {})
    m = RunManifest("demo", inputs={k: _jsonable(v) for k, v in fx.items()})
    t0 = time.perf_counter()
    for group, fn in CHECKS:
        try:
            fn(m, fx)
        except Exception as exc:  # a crashing group is a failed check, not a crash
            m.add(f"{group}: raised {type(exc).__name__}", None, str(exc), None, False, group)
    m.elapsed = time.perf_counter() - t0
    return m


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v
