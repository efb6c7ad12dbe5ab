import math
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classica.verifier import (
    Candidate,
    DerivativeUnavailableError,
    ImplicitODE,
    PiecewiseCandidate,
    constant_candidate,
    envelope_check,
    exp_candidate,
    nonuniqueness_witness,
    parabola_candidate,
    parabola_ode,
    residual_max,
    residual_piecewise,
    splice_candidate,
    taylor_general,
    taylor_ode,
    taylor_ode_as_printed,
    zero_candidate,
)

EXACT_GRID = [Fr(k, 10) for k in range(61)]


def test_residual_examples():
    ode = parabola_ode()
    assert residual_max(ode, parabola_candidate(3), EXACT_GRID) == 0
    assert residual_max(ode, zero_candidate(), EXACT_GRID) == 0
    grid = [k / 20 for k in range(21)]
    assert residual_max(taylor_ode(), constant_candidate(1), grid) == 0
    assert residual_max(taylor_ode(), taylor_general(0.5), grid) <= 1e-10


def test_taylor_general_derivatives_against_finite_differences():
    cand = taylor_general(0.3)
    h = 1e-5
    for x in (0.0, 0.4, 1.1):
        fd1 = (cand(x + h) - cand(x - h)) / (2 * h)
        fd2 = (cand(x + h) - 2 * cand(x) + cand(x - h)) / h**2
        assert abs(cand.derivative(x) - fd1) <= 1e-8
        assert abs(cand.derivative(x, 2) - fd2) <= 1e-4


@pytest.mark.parametrize("a", [-0.8, -0.3, 0.0, 0.5, 0.9])
def test_taylor_family_solves_equation(a):
    grid = [k / 10 for k in range(11)]
    if a < 0:
        grid = [x for x in grid if abs(a * x + math.sqrt(1 - a * a)) > 0.1]
    cand = taylor_general(a)
    for x in grid:
        # relative to the size of the terms; y grows large near the pole for a < 0
        scale = 4 * abs(cand(x)) ** 3 + 4 * cand(x) ** 2
        assert abs(residual_max(taylor_ode(), cand, [x])) <= 1e-13 * scale


def test_printed_taylor_variant_is_not_solved_by_family():
    grid = [k / 10 for k in range(11)]
    assert residual_max(taylor_ode_as_printed(), taylor_general(0.5), grid) > 1e-3
    assert residual_max(taylor_ode_as_printed(), constant_candidate(1), grid) == 0


def test_derivative_unavailable():
    ode = ImplicitODE(lambda x, y, yp, ypp: ypp + y, 2)
    bare = Candidate((math.sin, math.cos), "sin")
    with pytest.raises(DerivativeUnavailableError):
        residual_max(ode, bare, [0.0, 1.0])
    with pytest.raises(DerivativeUnavailableError):
        bare.derivative(0.0, 2)


def test_second_order_candidate():
    ode = ImplicitODE(lambda x, y, yp, ypp: ypp + y, 2)
    sin = Candidate((math.sin, math.cos, lambda x: -math.sin(x)), "sin")
    assert residual_max(ode, sin, [k / 7 for k in range(30)]) <= 1e-15


def test_splice_examples():
    ode = parabola_ode()
    res = residual_piecewise(ode, splice_candidate(-1, 2), [Fr(k, 4) - 5 for k in range(41)])
    assert res.max_residual == 0 and res.max_glue_gap == 0
    res = residual_piecewise(ode, splice_candidate(0, 0), [Fr(k, 4) - 5 for k in range(41)])
    assert res.max_residual == 0 and res.max_glue_gap == 0
    assert splice_candidate(0, 0).piece_for(Fr(1, 2))(Fr(1, 2)) == Fr(1, 4)


def test_broken_splice_has_glue_gap():
    # sign error on the left: (x + c1)^2 in place of (x - c1)^2
    c1, c2 = 1, 3
    wrong_left = parabola_candidate(-c1)
    cand = PiecewiseCandidate(c1, c2, (wrong_left, zero_candidate(), parabola_candidate(c2)))
    res = residual_piecewise(parabola_ode(), cand, [Fr(k, 2) for k in range(-4, 10)])
    gap = res.glue[0]
    assert gap.value_gap == (c1 + c1) ** 2 and gap.derivative_gap == 2 * (c1 + c1)


def test_infinite_knots_skip_glue():
    cand = PiecewiseCandidate(-math.inf, 2.0, (zero_candidate(), zero_candidate(), parabola_candidate(2.0)))
    res = residual_piecewise(parabola_ode(), cand, [0.0, 1.0, 3.0])
    assert [g.knot for g in res.glue] == [2.0]
    with pytest.raises(ValueError):
        PiecewiseCandidate(2, 1, (zero_candidate(),) * 3)


def test_splice_random_exact():
    rng = random.Random(11)
    for _ in range(20):
        c1, c2 = sorted(Fr(rng.randint(-40, 40), rng.randint(1, 6)) for _ in range(2))
        res = residual_piecewise(parabola_ode(), splice_candidate(c1, c2),
                                 [Fr(k, 3) - 15 for k in range(91)])
        assert res.max_residual == 0 and res.max_glue_gap == 0


def test_witness_examples():
    ode = parabola_ode()
    assert nonuniqueness_witness(ode, [zero_candidate(), parabola_candidate(3)], (3, 0)).nonunique
    yprime = ImplicitODE(lambda x, y, yp: yp - y, 1)
    r = nonuniqueness_witness(yprime, [exp_candidate(1.0), exp_candidate(2.0)], (0, 1))
    assert not r.nonunique and [e.passes for e in r.entries] == [True, False]
    r = nonuniqueness_witness(ode, [zero_candidate(), parabola_candidate(2)], (3, 1))
    assert not r.nonunique
    with pytest.raises(ValueError):
        nonuniqueness_witness(ode, [zero_candidate()], (0, 0))


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(1e-12, 5e-4), st.floats(1.0, 1e3))
def test_witness_monotone_in_tol(c, tol, factor):
    # the germs 0 and (x - c)^2 separate by 1e-2 on the default radius, so 10 * tol stays below that
    ode = parabola_ode()
    cands = [zero_candidate(), parabola_candidate(c), parabola_candidate(c + 0.5)]
    if nonuniqueness_witness(ode, cands, (c, 0.0), tol).nonunique:
        assert nonuniqueness_witness(ode, cands, (c, 0.0), min(tol * factor, 5e-4)).nonunique


def test_envelope_parabola_family():
    xs = [k / 4 for k in range(-8, 9)]
    cs = [k / 8 for k in range(-24, 25)]
    r = envelope_check(parabola_candidate, parabola_ode(), cs, xs, zero_candidate())
    assert r.is_envelope
    assert all(abs(c - x) <= 1e-6 for x, c, _, _ in r.contacts)


def test_envelope_rejects_non_solution():
    xs = [k / 4 for k in range(-4, 5)]
    cs = [k / 4 for k in range(-8, 9)]
    r = envelope_check(parabola_candidate, parabola_ode(), cs, xs, constant_candidate(1))
    assert not r.is_envelope and "singular" in r.reason


def test_envelope_taylor_family():
    xs = [k / 10 for k in range(11)]
    cs = [k / 40 for k in range(0, 39)]
    r = envelope_check(taylor_general, taylor_ode(), cs, xs, constant_candidate(1.0))
    assert r.is_envelope
    # tangency where a = x / sqrt(1 + x^2) (Cauchy-Schwarz equality case)
    for x, c, _, _ in r.contacts:
        assert abs(c - x / math.sqrt(1 + x * x)) <= 1e-4
