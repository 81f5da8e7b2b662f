"""Relabeling-invariant error metrics and Monte Carlo aggregates."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TrialOutcome",
    "AggregateStats",
    "flip_invariant_error",
    "aggregate",
    "wilson_interval",
    "data_only_erp_closed_form",
]

MAX_BRUTE_FORCE_K = 10

Z_95 = 1.959963984540054


@dataclass(frozen=True)
class TrialOutcome:
    error: float
    exact: bool
    best_permutation: tuple[int, ...]


@dataclass(frozen=True)
class AggregateStats:
    num_trials: int
    mean_error: float
    stderr_error: float
    erp: float
    erp_ci: tuple[float, float]


def flip_invariant_error(estimate, truth, k: int | None = None) -> TrialOutcome:
    """Misclassification rate minimized over community relabelings.

    Brute force over all k! permutations via the confusion matrix;
    k is capped at MAX_BRUTE_FORCE_K.  Ties go to the lexicographically
    smallest permutation.  exact is True iff the error is exactly zero.
    """
    est = np.asarray(estimate, dtype=np.int64)
    tru = np.asarray(truth, dtype=np.int64)
    if est.shape != tru.shape or est.ndim != 1 or est.size == 0:
        raise ValueError("estimate and truth must be equal-length nonempty vectors")
    if est.min() < 0 or tru.min() < 0:
        raise ValueError("labels must be nonnegative")
    if k is None:
        k = int(max(est.max(), tru.max())) + 1
    if not 1 <= k <= MAX_BRUTE_FORCE_K:
        raise ValueError(f"k must lie in [1, {MAX_BRUTE_FORCE_K}]")
    if est.max() >= k or tru.max() >= k:
        raise ValueError("label out of range for k")
    n = est.size
    confusion = np.bincount(tru * k + est, minlength=k * k).reshape(k, k)
    rows = np.arange(k)
    best_perm: tuple[int, ...] | None = None
    best_agree = -1
    for perm in itertools.permutations(range(k)):
        agree = int(confusion[rows, np.array(perm)].sum())
        if agree > best_agree:
            best_agree = agree
            best_perm = perm
    error = 1.0 - best_agree / n
    return TrialOutcome(
        error=0.0 if best_agree == n else error,
        exact=best_agree == n,
        best_permutation=best_perm,
    )


def wilson_interval(successes: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def aggregate(outcomes: Iterable[TrialOutcome]) -> AggregateStats:
    """Mean error with standard error, exact-recovery proportion with a
    95% Wilson interval."""
    outcomes = list(outcomes)
    m = len(outcomes)
    if m == 0:
        raise ValueError("need at least one outcome")
    errors = np.array([o.error for o in outcomes], dtype=np.float64)
    exact_count = sum(1 for o in outcomes if o.exact)
    stderr = float(errors.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return AggregateStats(
        num_trials=m,
        mean_error=float(errors.mean()),
        stderr_error=stderr,
        erp=exact_count / m,
        erp_ci=wilson_interval(exact_count, m),
    )


def data_only_erp_closed_form(n: int, alpha: float) -> float:
    """Exact-recovery probability of the attribute-only rule on the
    symmetric two-community benchmark with erasure exponent alpha.

    An erased vertex gets the tie-break label, which matches its true
    community with probability 1/2, so every vertex is independently
    correct with probability 1 - n^-alpha / 2 and exact recovery has
    probability (1 - n^-alpha / 2)^n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (1.0 - float(n) ** (-alpha) / 2.0) ** n
