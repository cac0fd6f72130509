import math

import numpy as np
import pytest

from solitoncap.quadrature import (
    QuadResult,
    QuadratureError,
    TailDetectionError,
    integrate_finite,
    integrate_semi_infinite,
)

# (integrand, a, b, exact); b = None means [a, inf)
KNOWN = [
    (lambda t: np.ones_like(t), 0.0, 1.0, 1.0),
    (lambda t: 1.0 / np.cosh(t) ** 2, -40.0, 40.0, 2.0),
    (lambda t: t * np.exp(-t * t), 0.0, 50.0, 0.5),
    (lambda t: np.exp(-t), 0.0, None, 1.0),
    (lambda t: t * np.exp(-t * t), 0.0, None, 0.5),
    (lambda t: t ** 3 * np.exp(-t), 0.0, None, 6.0),
    (lambda t: np.log(t), 0.0, 1.0, -1.0),
    (lambda t: 1.0 / np.sqrt(t), 0.0, 1.0, 2.0),
    (lambda t: np.cos(t), 0.0, math.pi / 2, 1.0),
    (lambda t: 1.0 / (1.0 + t * t), 0.0, 1e4, math.atan(1e4)),
]


def _integrate(f, a, b, **kw):
    if b is None:
        return integrate_semi_infinite(f, a, **kw)
    return integrate_finite(f, a, b, **kw)


@pytest.mark.parametrize("f,a,b,exact", KNOWN)
def test_known_integrals(f, a, b, exact):
    res = _integrate(f, a, b)
    assert isinstance(res, QuadResult)
    assert abs(res.value - exact) <= max(1e-12, 1e-10 * abs(exact))
    assert res.evaluations > 0


@pytest.mark.parametrize("f,a,b,exact", KNOWN)
def test_error_estimate_bounds_actual_error(f, a, b, exact):
    res = _integrate(f, a, b, rel_tol=1e-6, abs_tol=1e-8)
    # roundoff floor of the reference value
    assert abs(res.value - exact) <= res.abs_error_estimate + 4e-16 * abs(exact)


@pytest.mark.parametrize("c", [-3.0, 0.5, 10.0])
def test_linearity(c):
    f = lambda t: np.exp(-t) * np.sin(3 * t) + t ** 2  # noqa: E731
    base = integrate_finite(f, 0.0, 2.0)
    scaled = integrate_finite(lambda t: c * f(t), 0.0, 2.0)
    tol = 2 * max(1e-12, 1e-10 * abs(scaled.value))
    assert abs(scaled.value - c * base.value) <= tol


def test_additivity():
    f = lambda t: 1.0 / (1.0 + t ** 4)  # noqa: E731
    left = integrate_finite(f, -1.0, 0.7)
    right = integrate_finite(f, 0.7, 3.0)
    whole = integrate_finite(f, -1.0, 3.0)
    tol = 2 * (max(1e-12, 1e-10 * abs(left.value)) + max(1e-12, 1e-10 * abs(right.value)))
    assert abs(left.value + right.value - whole.value) <= tol


def test_vector_valued_integrand():
    res = integrate_finite(lambda t: np.stack([np.exp(-t), t ** 2], axis=1), 0.0, 2.0)
    assert res.value == pytest.approx([1 - math.exp(-2), 8 / 3], rel=1e-12)
    assert res.abs_error_estimate.shape == (2,)


def test_breakpoints_bracket_narrow_peaks():
    # a feature narrower than the node spacing must be bracketed by breakpoints
    f = lambda t: np.exp(-((t - 0.3) / 1e-4) ** 2)  # noqa: E731
    res = integrate_finite(f, 0.0, 1.0, points=[0.299, 0.301])
    assert res.value == pytest.approx(1e-4 * math.sqrt(math.pi), rel=1e-10)


def test_invalid_interval():
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 2.0, 1.0)
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 0.0, 1.0, rel_tol=0.0)


def test_budget_exhaustion_is_an_error():
    # wildly oscillating integrand cannot be resolved within a small budget
    with pytest.raises(QuadratureError):
        integrate_finite(lambda t: np.sin(1.0 / t), 1e-9, 1.0, max_evals=2000)


def test_non_finite_integrand_is_an_error():
    with pytest.raises(QuadratureError):
        integrate_finite(lambda t: np.full_like(t, np.nan), 0.0, 1.0)


def test_tail_detection_failure():
    with pytest.raises(TailDetectionError):
        integrate_semi_infinite(lambda t: 1.0 / (1.0 + t), 0.0, max_panels=20)


def test_semi_infinite_min_upper_delays_stop():
    # a bump far from the origin is only found because min_upper forces panels past it
    f = lambda t: np.exp(-(t - 300.0) ** 2)  # noqa: E731
    res = integrate_semi_infinite(f, 0.0, min_upper=400.0)
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_result_invariants():
    with pytest.raises(ValueError):
        QuadResult(1.0, -1.0, 3)
    with pytest.raises(ValueError):
        QuadResult(1.0, 0.0, 0)
