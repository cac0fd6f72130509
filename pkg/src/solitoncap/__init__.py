"""Soliton-amplitude channel: conditional statistics, entropies and a
closed-form lower bound on the per-soliton capacity."""

__version__ = "0.1.0"

from .capacity import (  # noqa: E402
    EntropyReport,
    f_integral,
    h_y_closed,
    h_y_given_x_closed,
    h_y_given_x_numeric,
    h_y_numeric,
    mi_asymptotic,
    mi_closed,
    mi_numeric,
    report,
)
from .channel import ChannelParams, InputDist  # noqa: E402
from .mc import McReport  # noqa: E402
from .quadrature import QuadResult, QuadratureError  # noqa: E402

__all__ = [
    "ChannelParams",
    "EntropyReport",
    "InputDist",
    "McReport",
    "QuadResult",
    "QuadratureError",
    "f_integral",
    "h_y_closed",
    "h_y_given_x_closed",
    "h_y_given_x_numeric",
    "h_y_numeric",
    "mi_asymptotic",
    "mi_closed",
    "mi_numeric",
    "report",
]
