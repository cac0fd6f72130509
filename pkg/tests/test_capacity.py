import math

import numpy as np
import pytest

from solitoncap.capacity import (
    LN2,
    EntropyReport,
    conditional_entropy_numeric,
    f_integral,
    f_integral_result,
    h_y_closed,
    h_y_given_x_closed,
    h_y_given_x_numeric,
    h_y_numeric,
    mi_asymptotic,
    mi_closed,
    mi_numeric,
    report,
)
from solitoncap.channel import ChannelParams, InputDist
from solitoncap.specfun import EULER_GAMMA


@pytest.mark.parametrize("rho", ["0.1", "1", "10", "100"])
def test_f_integral_matches_oracle(oracle, rho):
    ref = float(oracle["f_integral"][rho])
    assert f_integral(float(rho)) == pytest.approx(ref, rel=1e-8)


def test_f_integral_small_rho_vanishes():
    assert abs(f_integral(1e-6)) < 1e-6


def test_f_integral_quadratic_growth():
    scaled = [f_integral(r) / r**2 for r in (1e2, 1e3, 1e4, 1e5)]
    gaps = [abs(v - 2.0) for v in scaled]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_f_integral_error_estimate_is_small():
    res = f_integral_result(10.0)
    assert res.abs_error_estimate <= 1e-11 * abs(res.value) + 1e-300


def test_f_integral_domain():
    for bad in (0.0, -1.0, math.nan, math.inf, 2e5):
        with pytest.raises(ValueError):
            f_integral(bad)


GRID = np.logspace(-2, 4, 13)


@pytest.mark.parametrize("rho", GRID)
def test_mi_identity_and_positive(rho):
    inp = InputDist(1.0)
    mi = mi_closed(rho)
    assert mi > 0
    assert mi == pytest.approx(h_y_closed(inp, rho) - h_y_given_x_closed(inp, rho), abs=1e-12)


def test_mi_independent_of_signal_scale():
    for rho in (0.3, 30.0):
        a = report(InputDist(1.0), rho)
        b = report(InputDist(7.5), rho)
        shift = 0.5 * math.log(7.5)
        assert b.mi == pytest.approx(a.mi, abs=1e-13)
        assert b.h_y - a.h_y == pytest.approx(shift, abs=1e-13)
        assert b.h_y_given_x - a.h_y_given_x == pytest.approx(shift, abs=1e-13)


def test_rayleigh_entropy_limit():
    limit = 1.0 + math.log(0.5) + EULER_GAMMA / 2
    gaps = [abs(h_y_closed(InputDist(1.0), r) - limit) for r in (1e2, 1e4, 1e6)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4


def test_low_rho_conditional_entropy_matches_numeric():
    inp = InputDist(1.0)
    rho = 1e-3
    p = ChannelParams.from_rho(inp, rho)
    assert h_y_given_x_closed(inp, rho) == pytest.approx(h_y_given_x_numeric(inp, p), abs=1e-6)


@pytest.mark.parametrize("rho", [0.1, 3.0, 300.0])
def test_closed_forms_match_numeric(rho):
    inp = InputDist(2.0)
    p = ChannelParams.from_rho(inp, rho)
    assert h_y_closed(inp, rho) == pytest.approx(h_y_numeric(inp, p), abs=1e-6)
    assert h_y_given_x_closed(inp, rho) == pytest.approx(h_y_given_x_numeric(inp, p), abs=1e-6)
    assert mi_closed(rho) == pytest.approx(mi_numeric(inp, p), abs=2e-6)


def test_conditional_entropy_small_noise_limit():
    # for s << x**2 the conditional law is nearly Gaussian with variance s/2
    s = 1e-6
    h = conditional_entropy_numeric([1.0, 2.0], ChannelParams(s))
    gauss = 0.5 * math.log(2 * math.pi * math.e * s / 2)
    np.testing.assert_allclose(h, gauss, atol=1e-5)


def test_mi_asymptote_examples():
    assert mi_asymptotic(1.0) == 0.0
    assert mi_asymptotic(math.e**2) == pytest.approx(1.0, rel=1e-15)
    assert mi_asymptotic(1e4) / LN2 == pytest.approx(0.5 * math.log2(1e4), rel=1e-15)
    with pytest.raises(ValueError):
        mi_asymptotic(0.0)


def test_report_units_round_trip():
    rep = report(InputDist(1.0), 100.0)
    bits = report(InputDist(1.0), 100.0, units="bits")
    assert bits.units == "bits"
    assert bits.mi == pytest.approx(rep.mi / LN2, rel=1e-15)
    assert bits.ratio == rep.ratio
    back = bits.in_units("nats")
    assert back.h_y == pytest.approx(rep.h_y, rel=1e-15)
    with pytest.raises(ValueError):
        rep.in_units("hartleys")


def test_report_ratio_fields():
    rep = report(InputDist(1.0), 1000.0)
    assert rep.ratio == pytest.approx(rep.i_as / rep.mi, rel=1e-15)
    assert isinstance(rep, EntropyReport)
    low = report(InputDist(1.0), 0.5)
    # asymptote is negative below 0 dB while MI is positive
    assert low.i_as < 0 < low.mi


def test_mi_increasing():
    values = [mi_closed(r) for r in GRID]
    assert all(b > a for a, b in zip(values, values[1:]))
