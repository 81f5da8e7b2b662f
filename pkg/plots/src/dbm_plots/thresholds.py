"""Exact-recovery threshold formulas, duplicated from the recovery
package on purpose: two one-line closed forms keep this component free
of a dependency on the library internals."""

import math


def threshold_dbm(b: float, alpha: float) -> float:
    """Smallest within-rate a admitting exact recovery with erased
    attributes of exponent alpha, cross-rate b."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return (math.sqrt(b) + math.sqrt(2.0 * (1.0 - alpha))) ** 2


def threshold_sbm(b: float) -> float:
    """Graph-only recovery threshold at cross-rate b."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    return (math.sqrt(b) + math.sqrt(2.0)) ** 2
