"""Monte Carlo checks of the channel sampler against the closed forms.

Entropy estimates are plug-in averages ``-mean(ln p(sample))`` with exact
(quadrature) densities, so they test the sampler rather than a density
estimator.

Parallel runs split the ``n`` draws over a fixed number of substreams.
Substream ``i`` is seeded with ``numpy.random.SeedSequence(seed,
spawn_key=(i,))``, which hashes ``(seed, i)``. Results are concatenated in
substream order, so output depends on ``(seed, n_substreams)`` and never on
the worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .channel import (
    ChannelParams,
    InputDist,
    WINDOW_SIGMAS,
    log_pdf_y_given_x,
    output_pdf_numeric,
    pdf_y_given_x,
    rayleigh_sample,
    sample_y,
)
from .quadrature import integrate_finite

MIN_SAMPLES = 1000
MIN_GOF_SAMPLES = 10_000
MIN_GOF_BINS = 10
SIGMA_N_SQ_FLOOR = 1e-12
DEFAULT_SUBSTREAMS = 8


@dataclass(frozen=True)
class McReport:
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    gof_pvalue: Optional[float] = None

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.n_samples <= 0:
            raise ValueError("n_samples must be > 0")

    def within(self, reference, n_sigma=4.0):
        return abs(self.estimate - reference) <= n_sigma * self.std_error


def substream(seed, index):
    """Generator for substream ``index`` of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _split(n, k):
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def _check_common(params, n, minimum):
    if params.sigma_n_sq < SIGMA_N_SQ_FLOOR:
        raise ValueError(f"sigma_n_sq below the Monte Carlo floor {SIGMA_N_SQ_FLOOR:g}")
    if n < minimum:
        raise ValueError(f"need at least {minimum} samples, got {n}")


def _pair_logs(input_dist, params, count, seed, index):
    rng = substream(seed, index)
    x = rayleigh_sample(input_dist, rng, size=count)
    y = sample_y(x, params, rng)
    log_cond = log_pdf_y_given_x(y, x, params)
    log_out = np.log(output_pdf_numeric(y, input_dist, params))
    return log_cond, log_out


def draw_log_densities(input_dist: InputDist, params: ChannelParams, n, seed,
                       n_substreams=DEFAULT_SUBSTREAMS, workers=1):
    """Sample ``n`` pairs ``(X, Y)`` and return ``(ln p(y|x), ln p_Y(y))`` arrays."""
    counts = _split(n, n_substreams)
    jobs = [(c, i) for i, c in enumerate(counts) if c > 0]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _pair_logs(input_dist, params, job[0], seed, job[1]),
                                  jobs))
    else:
        parts = [_pair_logs(input_dist, params, c, seed, i) for c, i in jobs]
    log_cond = np.concatenate([p[0] for p in parts])
    log_out = np.concatenate([p[1] for p in parts])
    return log_cond, log_out


def _mean_report(values, seed, gof_pvalue=None):
    n = values.size
    return McReport(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(n)),
                    n, seed, gof_pvalue)


def mc_entropies(input_dist: InputDist, params: ChannelParams, n, seed,
                 n_substreams=DEFAULT_SUBSTREAMS, workers=1):
    """Plug-in estimates of ``h_Y``, ``h_{Y|X}`` and ``I_XY`` from one sample.

    The mutual information uses the paired differences
    ``ln p(y|x) - ln p_Y(y)``, which is tighter than differencing the two
    entropy estimates.
    """
    _check_common(params, n, MIN_SAMPLES)
    log_cond, log_out = draw_log_densities(input_dist, params, n, seed, n_substreams, workers)
    return {
        "h_y": _mean_report(-log_out, seed),
        "h_y_given_x": _mean_report(-log_cond, seed),
        "mi": _mean_report(log_cond - log_out, seed),
    }


def mc_entropy_y(input_dist: InputDist, params: ChannelParams, n, seed,
                 n_substreams=DEFAULT_SUBSTREAMS, workers=1) -> McReport:
    """Plug-in estimate of the output entropy ``h_Y`` (nats)."""
    return mc_entropies(input_dist, params, n, seed, n_substreams, workers)["h_y"]


def mc_entropy_y_given_x(input_dist: InputDist, params: ChannelParams, n, seed,
                         n_substreams=DEFAULT_SUBSTREAMS, workers=1) -> McReport:
    """Plug-in estimate of the conditional entropy ``h_{Y|X}`` (nats).

    Only the conditional density is needed, so no marginalisation is done.
    """
    _check_common(params, n, MIN_SAMPLES)
    parts = []
    for i, count in enumerate(_split(n, n_substreams)):
        if count == 0:
            continue
        rng = substream(seed, i)
        x = rayleigh_sample(input_dist, rng, size=count)
        y = sample_y(x, params, rng)
        parts.append(-log_pdf_y_given_x(y, x, params))
    return _mean_report(np.concatenate(parts), seed)


def conditional_cdf_edges(x, params: ChannelParams, n_bins):
    """Interior edges of ``n_bins`` equal-probability bins of ``Y | X = x``.

    Bin edges are roots of the quadrature CDF, found with Brent's method
    inside the window where the density has its mass.
    """
    s = params.sigma_n_sq
    half = WINDOW_SIGMAS * math.sqrt(0.5 * s)
    lo = max(x - half, 0.0)
    hi = x + half

    def density(y):
        return pdf_y_given_x(y, np.full_like(y, x), params)

    # cumulative mass on a fine partition narrows every root bracket
    grid = np.linspace(lo, hi, 257)
    masses = [integrate_finite(density, grid[j], grid[j + 1], rel_tol=1e-12,
                               abs_tol=1e-16).value for j in range(grid.size - 1)]
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    total = cum[-1]
    edges = []
    for k in range(1, n_bins):
        target = k / n_bins * total
        j = int(np.searchsorted(cum, target)) - 1
        j = min(max(j, 0), grid.size - 2)
        base = cum[j]

        def gap(y, j=j, base=base, target=target):
            if y <= grid[j]:
                return base - target
            part = integrate_finite(density, grid[j], y, rel_tol=1e-12, abs_tol=1e-16).value
            return base + part - target

        edges.append(optimize.brentq(gap, grid[j], grid[j + 1], xtol=1e-14, rtol=1e-14))
    return np.asarray(edges)


def gof_binned(x, params: ChannelParams, n, n_bins, seed, sampler=None) -> McReport:
    """Chi-square goodness of fit of the sampler to ``p(y|x)``.

    ``sampler(x, params, rng, size)`` defaults to :func:`sample_y` and can be
    replaced to check the power of the test. The report's estimate is the
    chi-square statistic with ``n_bins - 1`` degrees of freedom; its
    ``std_error`` is the statistic's null standard deviation
    ``sqrt(2 (n_bins - 1))``.
    """
    if x <= 0:
        raise ValueError("x must be > 0")
    if n < MIN_GOF_SAMPLES:
        raise ValueError(f"need at least {MIN_GOF_SAMPLES} samples, got {n}")
    if n_bins < MIN_GOF_BINS:
        raise ValueError(f"need at least {MIN_GOF_BINS} bins, got {n_bins}")
    if params.sigma_n_sq < SIGMA_N_SQ_FLOOR:
        raise ValueError(f"sigma_n_sq below the Monte Carlo floor {SIGMA_N_SQ_FLOOR:g}")
    sampler = sampler or sample_y
    edges = conditional_cdf_edges(x, params, n_bins)
    y = np.asarray(sampler(np.full(n, float(x)), params, substream(seed, 0)))
    counts = np.bincount(np.searchsorted(edges, y), minlength=n_bins)
    expected = n / n_bins
    statistic = float(np.sum((counts - expected) ** 2) / expected)
    dof = n_bins - 1
    pvalue = float(stats.chi2.sf(statistic, dof))
    return McReport(statistic, math.sqrt(2.0 * dof), n, seed, pvalue)
