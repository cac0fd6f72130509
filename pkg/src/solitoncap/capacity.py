"""Entropies and mutual information of the soliton channel with Rayleigh input.

Closed forms are functions of ``rho = sigma_s_sq / sigma_n_sq`` (and of
``sigma_s_sq`` through an additive ``ln sqrt(sigma_s_sq)`` for the two
entropies). All internal values are in nats.

Two exact rearrangements keep the closed forms stable at large ``rho``:

* ``rho + psi(1/rho) = psi(1 + 1/rho)`` (digamma recurrence), which removes
  the cancellation between ``rho`` and ``psi(1/rho) ~ -rho``.
* ``_bessel_balance = F(rho) sqrt(1 + 1/rho) / rho - 2 rho`` is formed once
  and shared by the conditional entropy and the mutual information, so the
  identity ``I = h_Y - h_{Y|X}`` holds to rounding.

Numeric counterparts integrate the defining integrals directly with nested
adaptive quadrature and never touch ``F``.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import (
    ChannelParams,
    InputDist,
    WINDOW_SIGMAS,
    check_rho,
    log_pdf_y_given_x,
    output_pdf_numeric,
    rayleigh_pdf,
)
from .quadrature import QuadResult, integrate_finite, integrate_semi_infinite
from .specfun import EULER_GAMMA, bessel_i1_scaled, bessel_k1_scaled, digamma

F_RHO_MAX = 1e5
#: tail exponent kept by the numeric entropy integrals (exp(-90) of the peak)
TAIL_EXPONENT = 90.0
LN2 = math.log(2.0)
PSI_1 = -EULER_GAMMA


@dataclass(frozen=True)
class EntropyReport:
    """Closed-form entropies, MI and the asymptote at one ``rho``.

    ``ratio`` is ``i_as / mi`` and is dimensionless; the other fields are in
    ``units`` (``"nats"`` or ``"bits"``).
    """

    h_y: float
    h_y_given_x: float
    mi: float
    i_as: float
    ratio: float
    units: str = "nats"

    def in_units(self, units):
        if units == self.units:
            return self
        if units not in ("nats", "bits"):
            raise ValueError(f"unknown units {units!r}")
        scale = 1.0 / LN2 if units == "bits" else LN2
        return replace(self, h_y=self.h_y * scale, h_y_given_x=self.h_y_given_x * scale,
                       mi=self.mi * scale, i_as=self.i_as * scale, units=units)


def _f_integrand(rho):
    inv = 1.0 / rho
    a = math.sqrt(1.0 + inv)
    a_minus_1 = inv / (a + 1.0)

    def integrand(xi):
        i1e = bessel_i1_scaled(xi)
        return (xi * bessel_k1_scaled(a * xi) * i1e * np.exp(-a_minus_1 * xi)
                * (xi + np.log(i1e)))

    return integrand, a_minus_1


def f_integral_result(rho, rel_tol=1e-11) -> QuadResult:
    """:func:`f_integral` with its quadrature diagnostics."""
    rho = check_rho(rho)
    if rho > F_RHO_MAX:
        raise ValueError(f"f_integral supports 0 < rho <= {F_RHO_MAX:g}, got {rho:g}")
    integrand, decay = _f_integrand(rho)
    xi_max = max(50.0, 40.0 / decay)
    return integrate_semi_infinite(integrand, 0.0, rel_tol=rel_tol, abs_tol=1e-300,
                                   first_panel=1.0, min_upper=xi_max)


def f_integral(rho, rel_tol=1e-11):
    """Bessel-product integral

    ``F(rho) = int_0^inf xi K1(a xi) I1(xi) ln I1(xi) dxi`` with
    ``a = sqrt(1 + 1/rho)``.

    Evaluated as ``xi k1e(a xi) i1e(xi) exp(-(a-1) xi) (xi + ln i1e(xi))`` so
    nothing overflows. ``F`` is negative for small ``rho`` and grows like
    ``2 rho**2`` for large ``rho``.

    Raises
    ------
    ValueError
        Outside ``0 < rho <= 1e5``.
    QuadratureError
        If the integral cannot be certified.
    """
    return f_integral_result(rho, rel_tol).value


def _bessel_balance(rho):
    inv = 1.0 / rho
    return inv * math.sqrt(1.0 + inv) * f_integral(rho) - 2.0 * rho


def _h_y(sigma_s_sq, rho):
    inv = 1.0 / rho
    return (0.5 * math.log(sigma_s_sq) - 0.5 * math.log1p(inv) - 0.5 * inv * math.log1p(rho)
            + digamma(1.0 + inv) - 1.5 * PSI_1 - LN2 + 1.0)


def _h_y_given_x(sigma_s_sq, rho, balance):
    inv = 1.0 / rho
    return (0.5 * math.log(sigma_s_sq) + 2.0 - (1.0 + inv) * math.log1p(rho) - balance
            - 0.5 * PSI_1 - LN2)


def _mi(rho, balance):
    inv = 1.0 / rho
    return (math.log(rho) + 0.5 * math.log1p(inv) + 0.5 * inv * math.log1p(rho)
            + digamma(1.0 + inv) + balance - PSI_1 - 1.0)


def h_y_closed(input_dist: InputDist, rho):
    """Output differential entropy ``h_Y`` in nats.

    Tends to the Rayleigh entropy ``1 + ln(sigma_s/2) + gamma/2`` as
    ``rho -> inf``.
    """
    return _h_y(input_dist.sigma_s_sq, check_rho(rho))


def h_y_given_x_closed(input_dist: InputDist, rho):
    """Conditional differential entropy ``h_{Y|X}`` in nats."""
    rho = check_rho(rho)
    return _h_y_given_x(input_dist.sigma_s_sq, rho, _bessel_balance(rho))


def mi_closed(rho):
    """Mutual information ``I_XY`` in nats; depends on ``rho`` only."""
    rho = check_rho(rho)
    return _mi(rho, _bessel_balance(rho))


def mi_asymptotic(rho):
    """Large-``rho`` asymptote ``0.5 ln rho`` (nats)."""
    return 0.5 * math.log(check_rho(rho))


def report(input_dist: InputDist, rho, units="nats") -> EntropyReport:
    """All closed-form quantities at one ``rho``, in ``units``."""
    rho = check_rho(rho)
    balance = _bessel_balance(rho)
    mi = _mi(rho, balance)
    i_as = 0.5 * math.log(rho)
    rep = EntropyReport(
        h_y=_h_y(input_dist.sigma_s_sq, rho),
        h_y_given_x=_h_y_given_x(input_dist.sigma_s_sq, rho, balance),
        mi=mi,
        i_as=i_as,
        ratio=i_as / mi if mi > 0 else math.nan,
    )
    return rep.in_units(units)


# numeric counterparts

def _neg_p_log_p(log_p):
    p = np.exp(log_p)
    return np.where(p > 0, -p * log_p, 0.0)


def h_y_numeric_result(input_dist: InputDist, params: ChannelParams, rel_tol=1e-8) -> QuadResult:
    """``-int p_Y ln p_Y dy`` with ``p_Y`` itself marginalised by quadrature."""
    S = input_dist.sigma_s_sq
    s = params.sigma_n_sq
    # p_Y decays like y exp(-y**2/(S+s))
    y_max = math.sqrt((S + s) * TAIL_EXPONENT)

    def integrand(y):
        p = output_pdf_numeric(y, input_dist, params, rel_tol=1e-10)
        with np.errstate(divide="ignore"):
            return _neg_p_log_p(np.log(p))

    return integrate_finite(integrand, 0.0, y_max, rel_tol=rel_tol, abs_tol=1e-12)


def conditional_entropy_numeric(x, params: ChannelParams, rel_tol=1e-10):
    """``h(Y|X=x) = -int p(y|x) ln p(y|x) dy`` for each ``x`` (vectorised)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = params.sigma_n_sq
    half = WINDOW_SIGMAS * math.sqrt(0.5 * s)
    lo = np.maximum(x - half, 0.0)
    width = x + half - lo

    def integrand(u):
        ys = lo[None, :] + width[None, :] * u[:, None]
        xs = np.broadcast_to(x[None, :], ys.shape)
        return _neg_p_log_p(log_pdf_y_given_x(ys, xs, params)) * width

    res = integrate_finite(integrand, 0.0, 1.0, rel_tol=rel_tol, abs_tol=1e-13,
                           points=(0.25, 0.5, 0.75))
    return np.atleast_1d(res.value)


def h_y_given_x_numeric_result(input_dist: InputDist, params: ChannelParams,
                               rel_tol=1e-8) -> QuadResult:
    """``-int p_X(x) int p(y|x) ln p(y|x) dy dx`` by nested quadrature."""
    x_max = math.sqrt(input_dist.sigma_s_sq * TAIL_EXPONENT)

    def integrand(x):
        return rayleigh_pdf(x, input_dist) * conditional_entropy_numeric(x, params)

    return integrate_finite(integrand, 0.0, x_max, rel_tol=rel_tol, abs_tol=1e-12)


def h_y_numeric(input_dist: InputDist, params: ChannelParams, rel_tol=1e-8):
    """Output entropy by numerical integration (nats)."""
    return h_y_numeric_result(input_dist, params, rel_tol).value


def h_y_given_x_numeric(input_dist: InputDist, params: ChannelParams, rel_tol=1e-8):
    """Conditional entropy by numerical integration (nats)."""
    return h_y_given_x_numeric_result(input_dist, params, rel_tol).value


def mi_numeric(input_dist: InputDist, params: ChannelParams, rel_tol=1e-8):
    """``h_y_numeric - h_y_given_x_numeric`` (nats)."""
    return (h_y_numeric(input_dist, params, rel_tol)
            - h_y_given_x_numeric(input_dist, params, rel_tol))
