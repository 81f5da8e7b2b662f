"""Monte Carlo experiment harness.

Sweeps a grid of (n, a, alpha) cells on the symmetric two-community
benchmark with erased attributes, running each recovery method on the
same sample per replicate (paired design: method comparisons at a cell
share graphs and attributes).  Results stream to an append-only CSV
that can be resumed after interruption; a JSON sidecar records the
configuration.  Record values are deterministic given the config --
only runtime_seconds varies between runs.

Seed derivation: each (n, a, alpha, replicate) cell hashes its
coordinates with blake2b and XORs the digest into base_seed, so cells
are reproducible in isolation and insensitive to grid order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .divergences import threshold_erased
from .metrics import flip_invariant_error
from .model import DbmParams, erased_channel, sample_dbm
from .recovery import METHODS, RefineConfig, recover

__all__ = [
    "SweepConfig",
    "ExperimentRecord",
    "OutputConflictError",
    "stable_seed",
    "symmetric_params",
    "run_sweep",
    "run_phase_diagram",
    "run_scaling",
    "crossing_table",
    "format_crossing_table",
    "read_records",
    "CSV_COLUMNS",
]

CSV_COLUMNS = [
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
]

DEFAULT_PHASE_METHODS = ("dbm", "dbm_iter", "sbm", "sbm_iter", "spectral", "data_only")
DEFAULT_SCALING_METHODS = ("dbm", "sbm")


class OutputConflictError(RuntimeError):
    """Output file already holds records and resume was not requested."""


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...]
    a_list: tuple[float, ...]
    b: float
    alpha_list: tuple[float, ...]
    methods: tuple[str, ...]
    replicates: int
    base_seed: int = 0
    refine: RefineConfig = field(default_factory=RefineConfig)
    output_path: str | None = None

    def __post_init__(self):
        if not self.n_list or not self.a_list or not self.alpha_list:
            raise ValueError("n_list, a_list, and alpha_list must be nonempty")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.b < 0:
            raise ValueError("b must be nonnegative")


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    a: float
    b: float
    alpha: float
    method: str
    replicate: int
    seed: int
    error: float
    exact: bool
    runtime_seconds: float
    iterations: int

    def key(self) -> tuple:
        return (self.n, self.a, self.b, self.alpha, self.method, self.replicate)

    def sort_key(self) -> tuple:
        return (self.n, self.a, self.alpha, self.method, self.replicate)


def stable_seed(base_seed: int, n: int, a: float, alpha: float, replicate: int) -> int:
    """Portable 63-bit seed for one grid cell."""
    payload = struct.pack("<qddq", int(n), float(a), float(alpha), int(replicate))
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return (int(base_seed) ^ int.from_bytes(digest, "little")) & 0x7FFFFFFFFFFFFFFF


def symmetric_params(n: int, a: float, b: float, alpha: float) -> DbmParams:
    """Two symmetric communities, rates a within and b across, erased
    attributes with exponent alpha.  Edge probabilities clamp at 1 when
    n is too small for the logarithmic scaling (tiny-n cells only)."""
    q = np.array([[a, b], [b, a]], dtype=np.float64)
    scale = math.log(n) / n if n > 1 else 0.0
    clip = bool(np.max(q) * scale > 1.0)
    return DbmParams(
        n=n,
        prior=np.array([0.5, 0.5]),
        q=q,
        channel=erased_channel(alpha, n, k=2),
        clip_edge_probs=clip,
    )


def _sample_hash(sample) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(sample.labels.tobytes())
    h.update(sample.attributes.tobytes())
    h.update(sample.graph.indices.tobytes())
    return h.hexdigest()


def _run_cell(args) -> list[dict]:
    n, a, b, alpha, methods, replicate, base_seed, refine, debug = args
    seed = stable_seed(base_seed, n, a, alpha, replicate)
    params = symmetric_params(n, a, b, alpha)
    sample = sample_dbm(params, seed)
    rows = []
    for method in methods:
        t0 = time.perf_counter()
        result = recover(sample, params, method, refine, seed)
        elapsed = time.perf_counter() - t0
        outcome = flip_invariant_error(result.labels, sample.labels, params.k)
        row = {
            "n": n,
            "a": float(a),
            "b": float(b),
            "alpha": float(alpha),
            "method": method,
            "replicate": replicate,
            "seed": seed,
            "error": outcome.error,
            "exact": outcome.exact,
            "runtime_seconds": elapsed,
            "iterations": result.iterations,
        }
        if debug:
            row["sample_hash"] = _sample_hash(sample)
        rows.append(row)
    return rows


def _record_from_row(row: dict) -> ExperimentRecord:
    return ExperimentRecord(
        n=int(row["n"]),
        a=float(row["a"]),
        b=float(row["b"]),
        alpha=float(row["alpha"]),
        method=str(row["method"]),
        replicate=int(row["replicate"]),
        seed=int(row["seed"]),
        error=float(row["error"]),
        exact=bool(int(row["exact"])),
        runtime_seconds=float(row["runtime_seconds"]),
        iterations=int(row["iterations"]),
    )


def _format_row(row: dict, columns: list[str]) -> list[str]:
    out = []
    for col in columns:
        val = row[col]
        if col == "exact":
            out.append("1" if val else "0")
        elif isinstance(val, float):
            out.append(repr(val))
        else:
            out.append(str(val))
    return out


def read_records(path) -> list[ExperimentRecord]:
    """Load experiment records from a results CSV."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"results file lacks columns: {', '.join(missing)}")
        for row in reader:
            records.append(_record_from_row(row))
    return records


def _meta_path(output_path: Path) -> Path:
    return output_path.with_suffix(".meta.json")


def _write_meta(output_path: Path, config: SweepConfig, info: dict) -> None:
    cfg = asdict(config)
    meta = {"config": cfg, "version": __version__, **info}
    _meta_path(output_path).write_text(json.dumps(meta, indent=2, sort_keys=True))


def run_sweep(
    config: SweepConfig,
    *,
    resume: bool = False,
    workers: int = 1,
    debug: bool = False,
    progress=None,
) -> list[ExperimentRecord]:
    """Execute the full grid; returns all records, canonically sorted.

    With an output_path, records append to the CSV as they complete and
    the file is rewritten in canonical order on success.  If the file
    already holds records, resume=True skips completed cells and
    computes only the rest; without resume the call refuses to touch
    the file.  workers > 1 distributes cells over processes; record
    values do not depend on scheduling.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    columns = CSV_COLUMNS + (["sample_hash"] if debug else [])
    grid = [
        (n, float(a), float(alpha))
        for n in config.n_list
        for a in config.a_list
        for alpha in config.alpha_list
    ]

    done_rows: list[dict] = []
    out_path: Path | None = None
    if config.output_path is not None:
        out_path = Path(config.output_path)
        if out_path.exists() and out_path.stat().st_size > 0:
            if not resume:
                raise OutputConflictError(
                    f"{out_path} already contains results; pass resume to continue"
                )
            for rec in read_records(out_path):
                done_rows.append(
                    {
                        **{c: getattr(rec, c) for c in CSV_COLUMNS},
                    }
                )
    done_keys = {
        (r["n"], r["a"], r["b"], r["alpha"], r["method"], r["replicate"])
        for r in done_rows
    }

    tasks = []
    for n, a, alpha in grid:
        for rep in range(config.replicates):
            pending = [
                m
                for m in config.methods
                if (n, a, float(config.b), alpha, m, rep) not in done_keys
            ]
            if pending:
                tasks.append(
                    (
                        n,
                        a,
                        float(config.b),
                        alpha,
                        tuple(pending),
                        rep,
                        config.base_seed,
                        config.refine,
                        debug,
                    )
                )

    started = time.time()
    if out_path is not None:
        fresh = not out_path.exists() or out_path.stat().st_size == 0
        sink = open(out_path, "a", newline="")
        writer = csv.writer(sink)
        if fresh:
            writer.writerow(columns)
            sink.flush()
    else:
        sink = writer = None

    new_rows: list[dict] = []
    try:
        if workers == 1:
            results_iter = map(_run_cell, tasks)
            for rows in results_iter:
                new_rows.extend(rows)
                if writer is not None:
                    for row in rows:
                        writer.writerow(_format_row(row, columns))
                    sink.flush()
                if progress is not None:
                    progress(len(new_rows))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_cell, t) for t in tasks]
                for fut in as_completed(futures):
                    rows = fut.result()
                    new_rows.extend(rows)
                    if writer is not None:
                        for row in rows:
                            writer.writerow(_format_row(row, columns))
                        sink.flush()
                    if progress is not None:
                        progress(len(new_rows))
    finally:
        if sink is not None:
            sink.close()

    all_rows = done_rows + new_rows
    records = [
        _record_from_row(row) if not isinstance(row, ExperimentRecord) else row
        for row in all_rows
    ]
    records.sort(key=lambda r: r.sort_key())

    if out_path is not None:
        # canonical order on disk; atomic so interruption keeps the old file
        by_key = {}
        for row in all_rows:
            by_key[
                (row["n"], row["a"], row["b"], row["alpha"], row["method"], row["replicate"])
            ] = row
        tmp = out_path.with_suffix(out_path.suffix + ".tmp")
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(columns)
            for rec in records:
                row = by_key[rec.key()]
                if "sample_hash" not in row and debug:
                    row = {**row, "sample_hash": ""}
                w.writerow(_format_row(row, columns))
        os.replace(tmp, out_path)

        clipped = sorted(
            {
                (n, a)
                for n, a, alpha in grid
                if n > 1 and max(a, config.b) * math.log(n) / n > 1.0
            }
        )
        _write_meta(
            out_path,
            config,
            {
                "started_at": started,
                "finished_at": time.time(),
                "resumed": resume and bool(done_rows),
                "workers": workers,
                "records_total": len(records),
                "records_new": len(new_rows),
                "clipped_cells": [list(c) for c in clipped],
            },
        )
    return records


def run_phase_diagram(
    config: SweepConfig, *, resume: bool = False, workers: int = 1, debug: bool = False, progress=None
) -> list[ExperimentRecord]:
    """Sweep the (a, alpha) grid at fixed n; see run_sweep."""
    return run_sweep(config, resume=resume, workers=workers, debug=debug, progress=progress)


def run_scaling(
    config: SweepConfig, *, resume: bool = False, workers: int = 1, debug: bool = False, progress=None
) -> list[ExperimentRecord]:
    """Sweep n at a fixed (a, b, alpha) point; see run_sweep.

    Use scaling_config to build a config pinned 10% above the recovery
    threshold."""
    return run_sweep(config, resume=resume, workers=workers, debug=debug, progress=progress)


def scaling_config(
    n_list=(10, 100, 1000, 10000),
    b: float = 10.0,
    alpha: float = 0.3,
    methods=DEFAULT_SCALING_METHODS,
    replicates: int = 1000,
    base_seed: int = 0,
    refine: RefineConfig | None = None,
    output_path: str | None = None,
    margin: float = 1.10,
) -> SweepConfig:
    """Scaling sweep at a = margin * threshold_erased(b, alpha)."""
    return SweepConfig(
        n_list=tuple(int(n) for n in n_list),
        a_list=(margin * threshold_erased(b, alpha),),
        b=b,
        alpha_list=(alpha,),
        methods=tuple(methods),
        replicates=replicates,
        base_seed=base_seed,
        refine=refine if refine is not None else RefineConfig(),
        output_path=output_path,
    )


def phase_config(
    n: int = 1000,
    a_list=tuple(range(14, 24)),
    b: float = 10.0,
    alpha_list=(0.2, 0.4, 0.6, 0.8),
    methods=DEFAULT_PHASE_METHODS,
    replicates: int = 1000,
    base_seed: int = 0,
    refine: RefineConfig | None = None,
    output_path: str | None = None,
) -> SweepConfig:
    """Phase-diagram sweep over (a, alpha) at fixed n."""
    return SweepConfig(
        n_list=(n,),
        a_list=tuple(float(a) for a in a_list),
        b=b,
        alpha_list=tuple(float(x) for x in alpha_list),
        methods=tuple(methods),
        replicates=replicates,
        base_seed=base_seed,
        refine=refine if refine is not None else RefineConfig(),
        output_path=output_path,
    )


def crossing_table(
    records, level: float = 0.95
) -> dict[tuple[str, float], float | None]:
    """Smallest grid value of a at which each (method, alpha) series
    reaches exact-recovery proportion >= level; None when it never does.
    Intended for single-n phase sweeps."""
    if not 0.0 < level <= 1.0:
        raise ValueError("level must lie in (0, 1]")
    counts: dict[tuple, list[int]] = {}
    for rec in records:
        key = (rec.method, rec.alpha, rec.a)
        cell = counts.setdefault(key, [0, 0])
        cell[0] += 1 if rec.exact else 0
        cell[1] += 1
    out: dict[tuple[str, float], float | None] = {}
    series: dict[tuple[str, float], list[tuple[float, float]]] = {}
    for (method, alpha, a), (hits, total) in counts.items():
        series.setdefault((method, alpha), []).append((a, hits / total))
    for key, points in series.items():
        crossing = None
        for a, erp in sorted(points):
            if erp >= level:
                crossing = a
                break
        out[key] = crossing
    return out


def format_crossing_table(crossings: dict[tuple[str, float], float | None]) -> str:
    """Plain-text table: rows are methods, columns are alpha values,
    entries the crossing a (or -- when the level is never reached)."""
    methods = sorted({m for m, _ in crossings})
    alphas = sorted({al for _, al in crossings})
    width = 12
    header = "method".ljust(width) + "".join(
        f"alpha={al:g}".rjust(width) for al in alphas
    )
    lines = [header]
    for m in methods:
        cells = []
        for al in alphas:
            val = crossings.get((m, al))
            cells.append(("--" if val is None else f"{val:g}").rjust(width))
        lines.append(m.ljust(width) + "".join(cells))
    return "\n".join(lines)
