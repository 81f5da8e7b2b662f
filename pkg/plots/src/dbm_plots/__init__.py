"""Figure rendering for community-recovery experiment results.

Standalone consumer of the experiment CSV contract; does not import
the recovery package.
"""

__version__ = "0.1.0"

from .aggregate import CellStats, MissingColumnsError, aggregate_cells, read_rows
from .figures import KINDS, RenderResult, render
from .thresholds import threshold_dbm, threshold_sbm

__all__ = [
    "CellStats",
    "MissingColumnsError",
    "RenderResult",
    "KINDS",
    "aggregate_cells",
    "read_rows",
    "render",
    "threshold_dbm",
    "threshold_sbm",
]
