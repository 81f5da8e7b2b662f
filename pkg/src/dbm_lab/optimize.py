"""Scalar optimization on the unit interval.

All divergence computations in this package reduce to one-dimensional
optimization of a unimodal (convex or concave) objective over [0, 1].
The routine here runs a coarse grid scan followed by golden-section
refinement of the bracket around the best grid point.  Endpoints are
always evaluated explicitly: several objectives are discontinuous at
0 or 1 when a distribution has zero entries, and the boundary value is
defined by convention rather than by limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

GRID_POINTS = 64
BRACKET_TOL = 1e-10

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptResult:
    """Outcome of a 1-D optimization over [0, 1]."""

    value: float
    argopt: float
    iterations: int


def maximize_unit_interval(f: Callable[[float], float]) -> OptResult:
    """Maximize f over [0, 1].

    Grid scan with GRID_POINTS equispaced points (endpoints included),
    then golden-section refinement of the two-cell bracket around the
    best grid point down to width BRACKET_TOL.  Correct for unimodal f;
    for f with a downward jump at an endpoint the interior scan still
    sees the supremum side.
    """
    grid = [i / (GRID_POINTS - 1) for i in range(GRID_POINTS)]
    values = [f(t) for t in grid]
    best = max(range(GRID_POINTS), key=lambda i: values[i])
    best_t, best_v = grid[best], values[best]

    if math.isinf(best_v):
        # no refinement can improve an infinite value
        return OptResult(best_v, best_t, 0)

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, GRID_POINTS - 1)]

    # golden-section: maintain interior probes c < d inside [lo, hi]
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    iterations = 0
    while hi - lo > BRACKET_TOL:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
        iterations += 1

    for t, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_t, best_v = t, v
    return OptResult(best_v, best_t, iterations)


def minimize_unit_interval(f: Callable[[float], float]) -> OptResult:
    """Minimize f over [0, 1]. Same scheme as maximize_unit_interval."""
    res = maximize_unit_interval(lambda t: -f(t))
    return OptResult(-res.value, res.argopt, res.iterations)
