"""Experiment CSV loading and per-cell aggregation.

The input contract is the experiment runner's output CSV: one row per
(n, a, b, alpha, method, replicate) with error, exact, runtime_seconds
and iterations columns.  Aggregation reduces replicates to per-cell
means; the exact-recovery proportion is the mean of the exact flags.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

REQUIRED_COLUMNS = (
    "n",
    "a",
    "b",
    "alpha",
    "method",
    "replicate",
    "seed",
    "error",
    "exact",
    "runtime_seconds",
    "iterations",
)


class MissingColumnsError(ValueError):
    """Input CSV lacks required columns; .columns names them."""

    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(f"missing columns: {', '.join(self.columns)}")


@dataclass(frozen=True)
class CellStats:
    n: int
    a: float
    b: float
    alpha: float
    method: str
    trials: int
    mean_error: float
    erp: float
    mean_runtime: float
    mean_iterations: float


def read_rows(path) -> list[dict]:
    """Parse the CSV into typed row dicts; header must carry every
    required column (extras such as a debug hash are ignored)."""
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in fields]
        if missing:
            raise MissingColumnsError(missing)
        rows = []
        for raw in reader:
            rows.append(
                {
                    "n": int(raw["n"]),
                    "a": float(raw["a"]),
                    "b": float(raw["b"]),
                    "alpha": float(raw["alpha"]),
                    "method": raw["method"],
                    "replicate": int(raw["replicate"]),
                    "seed": int(raw["seed"]),
                    "error": float(raw["error"]),
                    "exact": bool(int(raw["exact"])),
                    "runtime_seconds": float(raw["runtime_seconds"]),
                    "iterations": int(raw["iterations"]),
                }
            )
    return rows


def aggregate_cells(rows) -> list[CellStats]:
    """Reduce rows to one CellStats per (n, a, b, alpha, method)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["n"], row["a"], row["b"], row["alpha"], row["method"])
        groups.setdefault(key, []).append(row)
    cells = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[3], k[4])):
        members = groups[key]
        m = len(members)
        cells.append(
            CellStats(
                n=key[0],
                a=key[1],
                b=key[2],
                alpha=key[3],
                method=key[4],
                trials=m,
                mean_error=sum(r["error"] for r in members) / m,
                erp=sum(1 for r in members if r["exact"]) / m,
                mean_runtime=sum(r["runtime_seconds"] for r in members) / m,
                mean_iterations=sum(r["iterations"] for r in members) / m,
            )
        )
    return cells
