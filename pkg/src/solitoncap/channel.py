"""Discrete-time soliton-amplitude channel.

The received amplitude ``A`` given the launched amplitude ``A0`` follows a
noncentral chi-squared law with four degrees of freedom. The channel is
written on square-root amplitudes ``X = sqrt(A0)``, ``Y = sqrt(A)``:

    Y**2 = 1/2 * sum_{i=1..4} (X / sqrt(2) + N_i)**2,   N_i ~ N(0, sigma_n_sq)

The trial input is Rayleigh in ``X`` (exponential amplitudes with mean
``sigma_s_sq``).

Random numbers always come from a caller-owned :class:`numpy.random.Generator`.
Gaussians are drawn with ``Generator.standard_normal`` (ziggurat method) and
uniforms with ``Generator.random``; a given seed therefore replays the same
stream on one numpy version and platform.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate_finite
from .specfun import bessel_i1, bessel_i1_scaled

#: above this exponent magnitude the PDFs are evaluated in the log domain
DIRECT_EXPONENT_LIMIT = 700.0
#: half-width, in standard deviations, of the Gaussian envelope kept when
#: marginalising (exp(-72) of the peak is dropped)
WINDOW_SIGMAS = 12.0


@dataclass(frozen=True)
class ChannelParams:
    """Normalised accumulated ASE noise variance ``sigma_n_sq``."""

    sigma_n_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_n_sq) and self.sigma_n_sq > 0):
            raise ValueError(f"sigma_n_sq must be positive and finite, got {self.sigma_n_sq}")

    @classmethod
    def from_rho(cls, input_dist, rho):
        """Noise variance giving ``rho = sigma_s_sq / sigma_n_sq``."""
        rho = check_rho(rho)
        return cls(input_dist.sigma_s_sq / rho)


@dataclass(frozen=True)
class InputDist:
    """Rayleigh input with scale ``sigma_s_sq = E[X**2]`` (mean soliton amplitude)."""

    sigma_s_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_s_sq) and self.sigma_s_sq > 0):
            raise ValueError(f"sigma_s_sq must be positive and finite, got {self.sigma_s_sq}")


def check_rho(rho):
    """Validate a signal-to-noise ratio ``rho = sigma_s_sq / sigma_n_sq``."""
    rho = float(rho)
    if not (math.isfinite(rho) and rho > 0):
        raise ValueError(f"rho must be positive and finite, got {rho}")
    return rho


def rho_of(input_dist, params):
    return input_dist.sigma_s_sq / params.sigma_n_sq


def _arrays(first, second, first_name, second_name):
    u = np.asarray(first, dtype=float)
    v = np.asarray(second, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u < 0):
        raise ValueError(f"{first_name} must be finite and >= 0")
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ValueError(f"{second_name} must be finite and > 0")
    u, v = np.broadcast_arrays(u, v)
    return u, v


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


def pdf_amplitude(a, a0, params: ChannelParams):
    """Density of the received amplitude ``a`` given the launched ``a0``.

    ``p(a|a0) = (1/s) sqrt(a/a0) exp(-(a0+a)/s) I1(2 sqrt(a0 a)/s)`` with
    ``s = sigma_n_sq``.
    """
    a, a0 = _arrays(a, a0, "a", "a0")
    s = params.sigma_n_sq
    z = 2.0 * np.sqrt(a0 * a) / s
    expo = (a0 + a) / s
    out = np.zeros(a.shape)
    direct = (a > 0) & (z <= DIRECT_EXPONENT_LIMIT) & (expo <= DIRECT_EXPONENT_LIMIT)
    if np.any(direct):
        ad, a0d = a[direct], a0[direct]
        out[direct] = (np.sqrt(ad / a0d) * np.exp(-expo[direct]) * bessel_i1(z[direct]) / s)
    logd = (a > 0) & ~direct
    if np.any(logd):
        al, a0l = a[logd], a0[logd]
        log_p = (-math.log(s) + 0.5 * np.log(al / a0l)
                 - (np.sqrt(al) - np.sqrt(a0l)) ** 2 / s + np.log(bessel_i1_scaled(z[logd])))
        out[logd] = np.exp(log_p)
    return _scalar_or_array(out)


def log_pdf_y_given_x(y, x, params: ChannelParams):
    """Log-density of ``Y`` given ``X``; ``-inf`` at ``y = 0``."""
    y, x = _arrays(y, x, "y", "x")
    s = params.sigma_n_sq
    out = np.full(y.shape, -np.inf)
    pos = y > 0
    if np.any(pos):
        yp, xp = y[pos], x[pos]
        z = 2.0 * xp * yp / s
        out[pos] = (math.log(2.0 / s) + 2.0 * np.log(yp) - np.log(xp)
                    - (xp - yp) ** 2 / s + np.log(bessel_i1_scaled(z)))
    return _scalar_or_array(out)


def pdf_y_given_x(y, x, params: ChannelParams):
    """Density of ``Y = sqrt(A)`` given ``X = sqrt(A0)``.

    ``p(y|x) = (2/s) (y**2/x) exp(-(x**2+y**2)/s) I1(2xy/s)``. Direct
    evaluation is used while every exponent stays below
    ``DIRECT_EXPONENT_LIMIT``; otherwise the log-domain form is exponentiated.
    ``p(0|x) = 0``.
    """
    y, x = _arrays(y, x, "y", "x")
    s = params.sigma_n_sq
    z = 2.0 * x * y / s
    expo = (x * x + y * y) / s
    out = np.zeros(y.shape)
    direct = (y > 0) & (z <= DIRECT_EXPONENT_LIMIT) & (expo <= DIRECT_EXPONENT_LIMIT)
    if np.any(direct):
        yd, xd = y[direct], x[direct]
        out[direct] = (2.0 / s) * (yd * yd / xd) * np.exp(-expo[direct]) * bessel_i1(z[direct])
    logd = (y > 0) & ~direct
    if np.any(logd):
        out[logd] = np.exp(log_pdf_y_given_x(y[logd], x[logd], params))
    return _scalar_or_array(out)


def sample_y(x, params: ChannelParams, rng, size=None):
    """Draw ``Y`` given ``X = x`` from four Gaussian quadratures.

    ``x`` may be an array; ``size`` defaults to its shape.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("x must be finite and > 0")
    shape = x.shape if size is None else tuple(np.atleast_1d(size))
    noise = rng.standard_normal(shape + (4,)) * math.sqrt(params.sigma_n_sq)
    field = x[..., None] / math.sqrt(2.0) + noise
    out = np.sqrt(0.5 * np.sum(field * field, axis=-1))
    return _scalar_or_array(out)


def rayleigh_pdf(x, input_dist: InputDist):
    """Rayleigh density ``(2x/S) exp(-x**2/S)`` with ``S = sigma_s_sq``."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise ValueError("x must be finite and >= 0")
    S = input_dist.sigma_s_sq
    return _scalar_or_array(2.0 * x / S * np.exp(-x * x / S))


def rayleigh_sample(input_dist: InputDist, rng, size=None):
    """Inverse-CDF Rayleigh draw ``sqrt(-S ln U)`` with ``U`` in ``(0, 1]``."""
    u = 1.0 - rng.random(size)
    return _scalar_or_array(np.sqrt(-input_dist.sigma_s_sq * np.log(u)))


def marginal_window(y, input_dist, params):
    """Input range carrying the mass of ``p(y|x) p_X(x)`` for each ``y``.

    The product is a Gaussian in ``x`` times a bounded Bessel factor, with
    peak ``y S/(S+s)`` and variance ``s S / (2 (S + s))``.
    """
    S = input_dist.sigma_s_sq
    s = params.sigma_n_sq
    centre = y * S / (S + s)
    half = WINDOW_SIGMAS * math.sqrt(s * S / (2.0 * (S + s)))
    return np.maximum(centre - half, 0.0), centre + half


def output_pdf_numeric(y, input_dist: InputDist, params: ChannelParams,
                       rel_tol=1e-10, chunk=4096):
    """Output density ``p_Y(y) = int p(y|x) p_X(x) dx`` by adaptive quadrature.

    Vectorised over ``y``: every chunk of points shares one adaptive partition
    of a unit interval mapped onto each point's integration window.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y_arr)) or np.any(y_arr < 0):
        raise ValueError("y must be finite and >= 0")
    flat = y_arr.ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        yc = flat[start:start + chunk]
        lo, hi = marginal_window(yc, input_dist, params)
        width = hi - lo

        def integrand(u, yc=yc, lo=lo, width=width):
            xs = lo[None, :] + width[None, :] * u[:, None]
            ys = np.broadcast_to(yc[None, :], xs.shape)
            return pdf_y_given_x(ys, xs, params) * rayleigh_pdf(xs, input_dist) * width

        res = integrate_finite(integrand, 0.0, 1.0, rel_tol=rel_tol, abs_tol=1e-300,
                               points=(0.25, 0.5, 0.75))
        out[start:start + chunk] = res.value
    return _scalar_or_array(out.reshape(y_arr.shape))
