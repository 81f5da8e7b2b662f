"""Divergences governing exact recovery with node attributes.

The quantities here are error exponents for hypothesis tests between
Poisson degree profiles, between discrete attribute distributions, and
between joint profile/attribute observations:

* ``ch_divergence(a, b)``: max over t in [0, 1] of
  sum_x [(1-t) b_x + t a_x - a_x^t b_x^(1-t)].  Equals the Chernoff
  information between product-Poisson vectors with means a and b.
* ``chernoff_information(p, q)``: -log min over t of sum_x p_x^t q_x^(1-t)
  for discrete distributions, with +inf when supports are disjoint.
* ``ct_divergence``: a Chernoff/total-variation hybrid for a pair
  (profile distribution, attribute distribution) observed jointly; the
  tilt parameter is optimized separately for every attribute symbol.
* ``ct_divergence_poisson``: same, with product-Poisson profile
  distributions folded in closed form so no infinite sums appear.
* ``delta_noisy_erasure``: variational form of the joint exponent when
  attribute likelihoods decay polynomially in n, parameterized by decay
  exponents per observed symbol.
* ``threshold_erased`` / ``threshold_sbm``: closed-form recovery
  thresholds for the symmetric two-community benchmark with erased
  attributes, and without attributes.

Zero-probability conventions throughout: 0^0 = 1 and 0^c = 0 for c > 0,
matching the boundary behavior of the underlying tilted moments.  Both
Python's ``**`` and ``np.power`` implement these natively.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.special import logsumexp, xlogy

from .optimize import maximize_unit_interval, minimize_unit_interval

if TYPE_CHECKING:
    from .model import DbmParams

__all__ = [
    "as_mean_vector",
    "as_pmf",
    "tv_distance",
    "ch_divergence",
    "chernoff_information",
    "ct_divergence",
    "ct_divergence_poisson",
    "separation_rate",
    "delta_noisy_erasure",
    "threshold_erased",
    "threshold_sbm",
    "data_cannot_help",
]


def as_mean_vector(x, name: str = "mean vector") -> np.ndarray:
    """Validate a vector of nonnegative finite means."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    if np.any(v < 0):
        raise ValueError(f"{name} must be nonnegative")
    return v


def as_pmf(x, name: str = "pmf") -> np.ndarray:
    """Validate a probability vector: nonnegative, sums to 1 within 1e-12."""
    v = as_mean_vector(x, name)
    if abs(float(v.sum()) - 1.0) > 1e-12:
        raise ValueError(f"{name} must sum to 1 (got {v.sum()!r})")
    return v


def _pair(a, b, name_a: str, name_b: str, validator) -> tuple[np.ndarray, np.ndarray]:
    va = validator(a, name_a)
    vb = validator(b, name_b)
    if va.shape != vb.shape:
        raise ValueError(f"{name_a} and {name_b} must have equal length")
    return va, vb


def tv_distance(p, q) -> float:
    """Total variation distance between two pmfs on a common alphabet."""
    vp, vq = _pair(p, q, "p", "q", as_pmf)
    return 0.5 * float(np.abs(vp - vq).sum())


def ch_divergence(a, b) -> float:
    """CH divergence between nonnegative mean vectors a and b.

    max over t in [0,1] of sum_x [(1-t) b_x + t a_x - a_x^t b_x^(1-t)].
    Nonnegative; zero iff a == b.  Finite for finite inputs.
    """
    va, vb = _pair(a, b, "a", "b", as_mean_vector)
    ax = [float(x) for x in va]
    bx = [float(x) for x in vb]

    def objective(t: float) -> float:
        s = 0.0
        u = 1.0 - t
        for av, bv in zip(ax, bx):
            s += u * bv + t * av - (av**t) * (bv**u)
        return s

    return maximize_unit_interval(objective).value


def chernoff_information(p, q) -> float:
    """Chernoff information between discrete distributions p and q.

    -log min over t in [0,1] of sum_x p_x^t q_x^(1-t).  Symmetric in its
    arguments.  Returns +inf when the supports are disjoint (the tilted
    moment vanishes for every interior t).
    """
    vp, vq = _pair(p, q, "p", "q", as_pmf)

    def objective(t: float) -> float:
        return float(np.sum(np.power(vp, t) * np.power(vq, 1.0 - t)))

    m = minimize_unit_interval(objective).value
    if m <= 0.0:
        return math.inf
    return max(0.0, -math.log(m))


def ct_divergence(p1, q1, p2, q2) -> float:
    """Chernoff/total-variation divergence between joint models.

    Observation is a pair (X, U) with X ~ p_i and U ~ q_i independent
    under hypothesis i.  The exponent is

        -log sum_u min over t_u in [0,1] of
             sum_x (p1_x q1_u)^t_u (p2_x q2_u)^(1-t_u),

    i.e. the tilt is chosen adversarially per observed symbol u.  Equals
    chernoff_information(p1, p2) when q1 == q2 and
    -log(1 - tv_distance(q1, q2)) when p1 == p2.  Returns +inf when no
    symbol u admits a nonvanishing tilted moment.
    """
    vp1, vp2 = _pair(p1, p2, "p1", "p2", as_pmf)
    vq1, vq2 = _pair(q1, q2, "q1", "q2", as_pmf)

    total = 0.0
    for q1u, q2u in zip(vq1, vq2):
        left = vp1 * q1u
        right = vp2 * q2u

        def objective(t: float) -> float:
            return float(np.sum(np.power(left, t) * np.power(right, 1.0 - t)))

        total += minimize_unit_interval(objective).value
    if total <= 0.0:
        return math.inf
    return max(0.0, -math.log(total))


def _log_tilted_poisson(mu1: Sequence[float], mu2: Sequence[float], t: float) -> float:
    """log of the tilted moment of product Poissons, in closed form.

    sum_r [-t mu1_r - (1-t) mu2_r + mu1_r^t mu2_r^(1-t)], the log of
    E_2[(dP1/dP2)^t] extended to zero means by the 0^0 = 1 convention.
    """
    s = 0.0
    u = 1.0 - t
    for m1, m2 in zip(mu1, mu2):
        s += -t * m1 - u * m2 + (m1**t) * (m2**u)
    return s


def ct_divergence_poisson(mu_s, mu_t, q_s, q_t) -> float:
    """ct_divergence with product-Poisson profile distributions.

    The profile part of the tilted moment is folded in closed form, so
    the computation is exact up to the 1-D optimizations; nothing is
    truncated.  All work happens in log space: mean entries of order
    1e4 stay well within range.
    """
    vms, vmt = _pair(mu_s, mu_t, "mu_s", "mu_t", as_mean_vector)
    vqs, vqt = _pair(q_s, q_t, "q_s", "q_t", as_pmf)
    ms = [float(x) for x in vms]
    mt = [float(x) for x in vmt]

    log_terms = []
    for qsu, qtu in zip(vqs, vqt):

        def objective(t: float) -> float:
            return float(xlogy(t, qsu) + xlogy(1.0 - t, qtu)) + _log_tilted_poisson(
                ms, mt, t
            )

        log_terms.append(minimize_unit_interval(objective).value)

    total = logsumexp(log_terms)
    if total == -math.inf:
        return math.inf
    return max(0.0, -float(total))


def separation_rate(params: "DbmParams", s: int, t: int) -> float:
    """Finite-n pairwise separation exponent, normalized by log n.

    Computes ct_divergence_poisson between the degree-profile means of
    communities s and t at size n (mean vectors scaled by log n) paired
    with their attribute columns, divided by log n.  Exact recovery is
    predicted when this exceeds 1 for every pair.
    """
    if params.n <= 1:
        raise ValueError("separation_rate requires n >= 2")
    k = params.k
    if not (0 <= s < k and 0 <= t < k) or s == t:
        raise ValueError("s and t must be distinct community indices")
    log_n = math.log(params.n)
    mu_s = params.mean_profile_rate(s) * log_n
    mu_t = params.mean_profile_rate(t) * log_n
    cols = params.channel.cond_probs
    return ct_divergence_poisson(mu_s, mu_t, cols[:, s], cols[:, t]) / log_n


def delta_noisy_erasure(d_pairs, mu_s, mu_t) -> float:
    """Joint exponent for polynomially decaying attribute likelihoods.

    ``d_pairs`` has one row per observable symbol u and two columns: the
    decay exponents of the symbol's likelihood under the two hypotheses
    (so a likelihood n^-d contributes exponent d; the symbol equal to
    the hypothesized community has exponent 0, +inf encodes a symbol
    impossible under that hypothesis).  Returns

        min over u of max over t in [0,1] of
            [d_us t + d_ut (1-t)
             + sum_r (mu_s_r t + mu_t_r (1-t) - mu_s_r^t mu_t_r^(1-t))]

    with inf * 0 = 0 at the endpoints, where the convention reflects the
    vanishing tilt of the impossible hypothesis.
    """
    d = np.asarray(d_pairs, dtype=np.float64)
    if d.ndim != 2 or d.shape[1] != 2 or d.shape[0] < 1:
        raise ValueError("d_pairs must have shape (num_symbols, 2)")
    if np.any(np.isnan(d)) or np.any(d < 0):
        raise ValueError("decay exponents must be nonnegative (inf allowed)")
    vms, vmt = _pair(mu_s, mu_t, "mu_s", "mu_t", as_mean_vector)
    ms = [float(x) for x in vms]
    mt = [float(x) for x in vmt]

    def poisson_part(t: float) -> float:
        s = 0.0
        u = 1.0 - t
        for m1, m2 in zip(ms, mt):
            s += t * m1 + u * m2 - (m1**t) * (m2**u)
        return s

    best = math.inf
    for d_us, d_ut in d:
        dus, dut = float(d_us), float(d_ut)

        def objective(t: float) -> float:
            lin = (dus * t if t > 0.0 else 0.0) + (dut * (1.0 - t) if t < 1.0 else 0.0)
            return lin + poisson_part(t)

        best = min(best, maximize_unit_interval(objective).value)
    return best


def threshold_erased(b: float, alpha: float) -> float:
    """Exact-recovery threshold on a for the symmetric two-community
    benchmark with cross-rate b and attribute erasure exponent alpha."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return (math.sqrt(b) + math.sqrt(2.0 * (1.0 - alpha))) ** 2


def threshold_sbm(b: float) -> float:
    """Exact-recovery threshold on a for the symmetric two-community
    benchmark without attributes."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    return (math.sqrt(b) + math.sqrt(2.0)) ** 2


def data_cannot_help(params: "DbmParams", s: int, t: int, epsilon: float) -> bool:
    """Whether attributes cannot close the gap between communities s, t.

    True when the profile exponent alone falls short by epsilon
    (ch_divergence of the rate vectors below 1 - epsilon) while the
    attribute columns are nearly indistinguishable (total variation at
    most 1 - n^-epsilon).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = params.k
    if not (0 <= s < k and 0 <= t < k) or s == t:
        raise ValueError("s and t must be distinct community indices")
    graph_short = ch_divergence(
        params.mean_profile_rate(s), params.mean_profile_rate(t)
    ) < 1.0 - epsilon
    cols = params.channel.cond_probs
    tv_small = tv_distance(cols[:, s], cols[:, t]) <= 1.0 - params.n ** (-epsilon)
    return graph_short and tv_small
