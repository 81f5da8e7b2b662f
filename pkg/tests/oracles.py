"""Independent oracles for expected test values.

Everything here is implemented against the defining formulas with dense
grids or library statistics routines, sharing no code with the package
internals, so agreement means the package's optimizer-based paths hit
the right numbers rather than merely being self-consistent.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats


def grid_max_ch(a, b, step: float = 1e-6) -> float:
    """Dense-grid evaluation of the CH divergence objective."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = np.linspace(0.0, 1.0, round(1.0 / step) + 1)[:, None]
    with np.errstate(invalid="ignore"):
        vals = (1.0 - t) * b + t * a - np.power(a, t) * np.power(b, 1.0 - t)
    return float(np.nanmax(vals.sum(axis=1)))


def grid_min_chernoff(p, q, step: float = 1e-6) -> float:
    """Dense-grid Chernoff information for discrete distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    t = np.linspace(0.0, 1.0, round(1.0 / step) + 1)[:, None]
    vals = (np.power(p, t) * np.power(q, 1.0 - t)).sum(axis=1)
    m = float(vals.min())
    return math.inf if m <= 0.0 else -math.log(m)


def poisson_cutoffs(mu1, mu2) -> np.ndarray:
    """Per-coordinate truncation points ceil(m + 10 sqrt(m)) at
    m = max of the two means (so both pmfs share an alphabet)."""
    top = np.maximum(np.asarray(mu1, float), np.asarray(mu2, float))
    top = np.maximum(top, 1.0)
    return np.ceil(top + 10.0 * np.sqrt(top)).astype(int)


def truncated_poisson_product(mu, cutoffs) -> np.ndarray:
    """Flattened pmf of independent Poissons truncated coordinatewise
    and renormalized."""
    pmf = np.ones(1)
    for m, cut in zip(np.asarray(mu, float), cutoffs):
        marginal = stats.poisson.pmf(np.arange(cut + 1), m)
        marginal = marginal / marginal.sum()
        pmf = np.outer(pmf, marginal).ravel()
    return pmf


def noisy_label_closed_form(a: float, b: float, alpha: float) -> float:
    """Joint exponent for the symmetric noisy-label pair, in closed form.

    With T = log(a/b) the interior stationary point exists iff
    alpha < T (a - b) / 2; otherwise the maximum sits at the boundary
    and the exponent is alpha itself.
    """
    if not a > b > 0:
        raise ValueError("requires a > b > 0")
    t = math.log(a / b)
    if alpha >= t * (a - b) / 2.0:
        return alpha
    eta = math.sqrt(alpha * alpha + a * b * t * t)
    return (
        alpha / 2.0
        + (a + b) / 2.0
        - eta / t
        + (alpha / (2.0 * t)) * math.log((eta + alpha) / (eta - alpha))
    )


def erased_label_closed_form(a: float, b: float, alpha: float) -> float:
    """Joint exponent for the symmetric erased-label pair."""
    return alpha + (math.sqrt(a) - math.sqrt(b)) ** 2 / 2.0


def erased_exponent_table(alpha: float) -> list[list[float]]:
    """Decay-exponent rows (under s, under t) for the erased channel:
    the two label symbols and the erasure symbol."""
    inf = math.inf
    return [[0.0, inf], [inf, 0.0], [alpha, alpha]]


def noisy_exponent_table(alpha: float) -> list[list[float]]:
    """Decay-exponent rows for the two-community noisy-label channel."""
    return [[0.0, alpha], [alpha, 0.0]]
