import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classica.integrators import NonFiniteStateError
from classica.phase_plane import (
    AutonomousSystem2D,
    DegenerateSystemError,
    Kind,
    LinearSystemCoeffs,
    NotCriticalError,
    classify_linear,
    classify_point,
    find_critical_points,
    integrate_path,
    linearize,
    phase_portrait,
    volterra_invariant,
    volterra_system,
)
from classica.series import BivariatePolynomial as BP

FIXTURES = {
    Kind.CENTER: (0, 1, -1, 0),
    Kind.NODE_EQUAL: (1, 0, 0, 1),
    Kind.SADDLE: (1, 0, 0, -1),
    Kind.SPIRAL: (-1, 1, -1, -1),
    Kind.NODE_DISTINCT: (-1, 0, 0, -2),
}


@pytest.mark.parametrize("kind,coeffs", list(FIXTURES.items()))
def test_five_classes(kind, coeffs):
    rep = classify_linear(LinearSystemCoeffs(*coeffs))
    assert rep.kind is kind
    # oracle: eigenvalues of the coefficient matrix
    ev = sorted(np.linalg.eigvals(np.array(coeffs, float).reshape(2, 2)), key=lambda z: (z.real, z.imag))
    got = sorted([rep.m1, rep.m2], key=lambda z: (z.real, z.imag))
    assert np.allclose(ev, got, atol=1e-12)


def test_degenerate_rejected():
    with pytest.raises(DegenerateSystemError):
        classify_linear(LinearSystemCoeffs(1, 2, 2, 4))
    with pytest.raises(DegenerateSystemError):
        classify_linear(LinearSystemCoeffs(1.0, 2.0, 2.0, 4.0 + 1e-20))


def test_float_center_threshold_and_margin():
    rep = classify_linear(LinearSystemCoeffs(1e-12, 1.0, -1.0, 0.0))
    assert rep.kind is Kind.CENTER and rep.margin <= 1e-11
    assert classify_linear(LinearSystemCoeffs(1e-6, 1.0, -1.0, 0.0)).kind is Kind.SPIRAL


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.integers(-6, 6)] * 4), st.fractions(min_value=Fr(1, 20), max_value=20))
def test_class_invariant_under_positive_scaling(coeffs, k):
    c = LinearSystemCoeffs(*coeffs)
    if c.det == 0:
        return
    scaled = LinearSystemCoeffs(*(k * v for v in c.as_tuple()))
    assert classify_linear(c).kind is classify_linear(scaled).kind


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.integers(-6, 6)] * 4), st.integers(-12, 12), st.integers(-12, 12))
def test_class_invariant_under_rotation(coeffs, p, q):
    c = LinearSystemCoeffs(*coeffs)
    if c.det == 0 or (p == 0 and q == 0):
        return
    # exact rotation by a rational point on the unit circle
    n = p * p + q * q
    cs, sn = Fr(p * p - q * q, n), Fr(2 * p * q, n)
    R = [[cs, -sn], [sn, cs]]
    Rt = [[cs, sn], [-sn, cs]]
    A = [[c.a1, c.b1], [c.a2, c.b2]]
    mul = lambda X, Y: [[sum(X[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]  # noqa: E731
    B = mul(mul(R, A), Rt)
    rot = LinearSystemCoeffs(B[0][0], B[0][1], B[1][0], B[1][1])
    assert classify_linear(c).kind is classify_linear(rot).kind


def test_volterra_critical_points():
    v = volterra_system(1, 1, 1, 1)
    pts = find_critical_points(v, (-1, 3, -1, 3))
    assert pts == [(0, 0), (1, 1)]
    assert classify_point(v, pts[0]).kind is Kind.SADDLE
    interior = classify_point(v, pts[1])
    assert interior.kind is Kind.CENTER and interior.caveat
    assert linearize(v, (1, 1)).trace == 0


def test_linear_and_empty_critical_sets():
    lin = AutonomousSystem2D.linear(LinearSystemCoeffs(2, 1, 1, 3))
    assert find_critical_points(lin, (-5, 5, -5, 5)) == [(0, 0)]
    none = AutonomousSystem2D(BP({(2, 0): 1, (0, 0): 1}), BP({(0, 1): 1}))
    assert find_critical_points(none, (-5, 5, -5, 5)) == []


def test_newton_fallback_for_general_fields():
    # x' = x^2 - 1, y' = y - x  -> (-1, -1), (1, 1)
    sysn = AutonomousSystem2D(BP({(2, 0): 1, (0, 0): -1}), BP({(0, 1): 1, (1, 0): -1}))
    pts = find_critical_points(sysn, (-3, 3, -3, 3))
    assert len(pts) == 2
    assert np.allclose(pts, [(-1, -1), (1, 1)], atol=1e-10)


def test_linearize_examples():
    v = volterra_system(1, 1, 1, 1)
    assert linearize(v, (1, 1)).as_tuple() == (0, -1, 1, 0)
    assert linearize(v, (0, 0)).as_tuple() == (1, 0, 0, -1)
    c = LinearSystemCoeffs(2, -1, 3, 5)
    assert linearize(AutonomousSystem2D.linear(c), (0, 0)) == c
    with pytest.raises(NotCriticalError):
        linearize(v, (2, 1))


@settings(max_examples=50, deadline=None)
@given(*[st.fractions(min_value=Fr(1, 10), max_value=10, max_denominator=10)] * 4)
def test_volterra_interior_is_center_for_positive_params(a, b, c, d):
    v = volterra_system(a, b, c, d)
    interior = (c / d, a / b)
    lin = linearize(v, interior)
    assert lin.trace == 0 and lin.det == a * c
    assert lin.as_tuple() == (0, -b * c / d, a * d / b, 0)
    assert classify_linear(lin).kind is Kind.CENTER


def test_dH_dt_vanishes_identically():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b, c, d = rng.uniform(0.2, 3, 4)
        x, y = rng.uniform(0.1, 5, 2)
        fx, gy = a * x - b * x * y, -c * y + d * x * y
        dH = (d - c / x) * fx + (b - a / y) * gy
        assert abs(dH) <= 1e-12 * (1 + abs(fx) + abs(gy)) * 10


def test_paths():
    v = volterra_system()
    still = integrate_path(v, (1.0, 1.0), 1e-2, 5.0)
    assert np.all(still.x == 1.0) and np.all(still.y == 1.0)
    orbit = integrate_path(v, (2.0, 1.0), 1e-3, 12.0)
    d = np.hypot(orbit.x - 2.0, orbit.y - 1.0)
    far = np.argmax(d > 0.5)
    assert np.min(d[far:]) <= 1e-3
    saddle = AutonomousSystem2D.linear(LinearSystemCoeffs(1, 0, 0, -1))
    p = integrate_path(saddle, (1e-6, 1.0), 1e-2, 5.0)
    assert np.all(np.diff(p.x) > 0) and np.all(np.diff(p.y) < 0)
    with pytest.raises(ValueError):
        integrate_path(v, (1, 1), 0.0, 1.0)


def test_blow_up_flag():
    blow = AutonomousSystem2D(BP({(2, 0): 1}), BP({}))
    p = integrate_path(blow, (1.0, 0.0), 1e-3, 2.0)
    # exact solution 1 / (1 - t) blows up at t = 1
    assert p.blew_up and p.t[-1] <= 1.0 + 2e-3 and p.t[-1] < 2.0


def test_volterra_drift_and_order():
    v = volterra_system(1, 1, 1, 1)
    d1 = volterra_invariant((1, 1, 1, 1), integrate_path(v, (2.0, 1.0), 1e-3, 20.0))
    d2 = volterra_invariant((1, 1, 1, 1), integrate_path(v, (2.0, 1.0), 2e-3, 20.0))
    assert d1 <= 1e-6
    assert 12 <= d2 / d1 <= 20


def test_invariant_rejects_axis():
    v = volterra_system()
    p = integrate_path(v, (0.0, 1.0), 1e-2, 1.0)
    with pytest.raises(ValueError):
        volterra_invariant((1, 1, 1, 1), p)


def test_uniqueness_proxy_restart_on_path():
    v = volterra_system()
    full = integrate_path(v, (2.0, 1.0), 1e-3, 4.0)
    k = 1500
    rest = integrate_path(v, (full.x[k], full.y[k]), 1e-3, 4.0 - full.t[k])
    assert np.max(np.abs(rest.x - full.x[k:])) <= 1e-6
    assert np.max(np.abs(rest.y - full.y[k:])) <= 1e-6


def test_portrait_volterra(tmp_path):
    v = volterra_system()
    b = phase_portrait(v, (0.5, 2.5, 0.5, 2.5), 3, 1e-2, 10.0)
    kinds = {tuple(r.location): r.kind for r in b.reports}
    assert kinds == {(0, 0): Kind.SADDLE, (1, 1): Kind.CENTER}
    assert len(b.paths) == 18
    assert [p.seed_id for p in b.paths] == sorted(p.seed_id for p in b.paths)
    for pp_ in b.paths:
        assert volterra_invariant((1, 1, 1, 1), pp_.path) <= 1e-6
    out = tmp_path / "paths.csv"
    b.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "seed_id,direction,t,x,y"
    assert len(lines) == 1 + sum(len(p.path.t) for p in b.paths)
    b2 = phase_portrait(v, (0.5, 2.5, 0.5, 2.5), 3, 1e-2, 10.0)
    b2.to_csv(tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == out.read_bytes()


def test_portrait_linear_center_circles():
    c = AutonomousSystem2D.linear(LinearSystemCoeffs(0, 1, -1, 0))
    b = phase_portrait(c, (-2, 2, -2, 2), 3, 1e-2, 10.0)
    for pp_ in b.paths:
        r = np.hypot(pp_.path.x, pp_.path.y)
        if r[0] > 0:
            assert np.max(np.abs(r - r[0])) / r[0] <= 1e-6


def test_portrait_empty_seed_grid():
    b = phase_portrait(volterra_system(), (0.5, 2.5, 0.5, 2.5), 0, 1e-2, 1.0)
    assert b.paths == () and len(b.reports) == 2
