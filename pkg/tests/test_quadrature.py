import math

import mpmath
import pytest

from classica.quadrature import QuadratureError, gauss_kronrod_15, geometric_breakpoints, integrate


def test_gk15_exact_for_low_degree():
    val, err = gauss_kronrod_15(lambda x: x**6 - 2 * x**3 + 1, -1.0, 2.0)
    exact = (2**7 + 1) / 7 - (2**4 - 1) / 2 + 3
    assert abs(val - exact) <= 1e-13


def test_adaptive_smooth_matches_mpmath():
    f = lambda x: math.exp(-x * x) * math.cos(3 * x)  # noqa: E731
    val, err = integrate(f, 0.0, 4.0, 1e-13)
    ref = float(mpmath.quad(lambda t: mpmath.exp(-t * t) * mpmath.cos(3 * t), [0, 4]))
    assert abs(val - ref) <= 1e-12
    assert err <= 1e-13


def test_reversed_limits():
    v1, _ = integrate(math.sin, 0.0, 2.0)
    v2, _ = integrate(math.sin, 2.0, 0.0)
    assert v1 == -v2


def test_endpoint_singularity_with_presplit():
    f = lambda t: 1 / math.sqrt(1 - t)  # noqa: E731
    val, _ = integrate(f, 0.0, 1.0 - 1e-12, 1e-12, singular_end="b")
    ref = 2 - 2 * math.sqrt(1e-12)
    assert abs(val - ref) <= 1e-10


def test_breakpoints_sorted():
    pts = geometric_breakpoints(0.0, 1.0, "b", levels=5)
    assert pts == sorted(pts) and pts[0] == 0.0 and pts[-1] == 1.0 and len(pts) == 7
    with pytest.raises(ValueError):
        geometric_breakpoints(0.0, 1.0, "c")


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: float("nan"), 0.0, 1.0)
