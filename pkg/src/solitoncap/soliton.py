"""Single-soliton waveform, energy and the physical-to-dimensionless mapping.

Time is normalised by the symbol interval ``T_s``, distance by
``L_s = T_s**2 / |beta2|`` and power by ``1 / (gamma * L_s)``. Only
isolated pulses are modelled; pulse interaction and timing jitter are not.
"""

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .quadrature import QuadResult, integrate_finite


def _require_positive(name, value):
    if not (np.all(np.isfinite(value)) and np.all(np.asarray(value) > 0)):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalLink:
    """Fibre link in SI units.

    Attributes
    ----------
    beta2 : float
        Group-velocity dispersion [s^2/m]; negative (anomalous dispersion).
    gamma_nl : float
        Kerr nonlinearity coefficient [1/(W m)].
    alpha : float
        Attenuation coefficient [1/m].
    K_T : float
        Raman pump coefficient (close to 1, never below).
    photon_energy : float
        Mean photon energy h*nu [J].
    T_s : float
        Symbol interval [s].
    L : float
        Link length [m].
    """

    beta2: float
    gamma_nl: float
    alpha: float
    K_T: float
    photon_energy: float
    T_s: float
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.beta2) and self.beta2 < 0):
            raise ValueError(f"beta2 must be negative (anomalous dispersion), got {self.beta2}")
        for name in ("gamma_nl", "alpha", "photon_energy", "T_s", "L"):
            _require_positive(name, getattr(self, name))
        if not (math.isfinite(self.K_T) and self.K_T >= 1.0):
            raise ValueError(f"K_T must be >= 1, got {self.K_T}")


@dataclass(frozen=True)
class NormalizedLink:
    """Dimensionless description of a :class:`PhysicalLink`.

    ``L_s`` [m], ``sigma0_sq`` [W/Hz] and ``power_scale`` [W] keep units; ``D``,
    ``sigma_n_sq`` and ``z_end`` are dimensionless.
    """

    L_s: float
    D: float
    sigma0_sq: float
    sigma_n_sq: float
    power_scale: float
    z_end: float

    def as_dict(self):
        return asdict(self)


class SeparationMargin(NamedTuple):
    margin: float
    width: float


def waveform(a0, t):
    """Fundamental soliton ``a0 * sech(a0 * t)`` centred on its slot."""
    _require_positive("a0", a0)
    # exp form avoids cosh overflow in the far tails
    x = np.abs(a0 * np.asarray(t, dtype=float))
    e = np.exp(-x)
    out = 2.0 * a0 * e / (1.0 + e * e)
    return float(out) if np.ndim(out) == 0 else out


def energy_closed(a0):
    """Pulse energy over the whole line, ``E = 2 a0``."""
    _require_positive("a0", a0)
    return 2.0 * a0


def energy_numeric(a0, half_window, rel_tol=1e-12, abs_tol=1e-14):
    """Integrate ``|waveform|**2`` over ``[-half_window, half_window]``.

    The exact value is ``2 a0 tanh(a0 half_window)``.
    """
    _require_positive("a0", a0)
    _require_positive("half_window", half_window)
    return integrate_finite(lambda t: waveform(a0, t) ** 2, -half_window, half_window,
                            rel_tol=rel_tol, abs_tol=abs_tol, points=[0.0])


def separation_margin(a0):
    """Interaction margin ``exp(-a0)`` and pulse width ``1/a0``.

    Neighbouring solitons are non-interacting when the margin is much smaller
    than one and the width is below the unit slot. The threshold is left to
    the caller.
    """
    _require_positive("a0", a0)
    return SeparationMargin(math.exp(-a0), 1.0 / a0)


def normalize(link: PhysicalLink) -> NormalizedLink:
    """Map physical link parameters to dimensionless channel units."""
    L_s = link.T_s ** 2 / abs(link.beta2)
    sigma0_sq = link.alpha * link.K_T * link.photon_energy
    D = link.gamma_nl * L_s ** 2 * sigma0_sq / (2.0 * link.T_s)
    z_end = link.L / L_s
    return NormalizedLink(
        L_s=L_s,
        D=D,
        sigma0_sq=sigma0_sq,
        sigma_n_sq=z_end * D / 2.0,
        power_scale=1.0 / (link.gamma_nl * L_s),
        z_end=z_end,
    )


def snr(rho, kappa):
    """SNR ``2 * kappa * rho`` for bandwidth-to-symbol-rate ratio ``kappa``."""
    _require_positive("rho", rho)
    _require_positive("kappa", kappa)
    return 2.0 * kappa * rho


__all__ = [
    "PhysicalLink",
    "NormalizedLink",
    "QuadResult",
    "SeparationMargin",
    "waveform",
    "energy_closed",
    "energy_numeric",
    "separation_margin",
    "normalize",
    "snr",
]
