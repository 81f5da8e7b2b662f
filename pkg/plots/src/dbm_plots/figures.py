"""Render experiment CSVs into the six standard figure kinds.

Every figure reports its threshold guidelines back to the caller in
data coordinates (never pixels), so tests and downstream tooling can
check overlay placement without decoding images.  Rendering is
deterministic given the input file: fixed figure geometry, no
timestamps in the output metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .aggregate import CellStats, aggregate_cells, read_rows
from .thresholds import threshold_dbm, threshold_sbm

KINDS = (
    "erp_curves",
    "logerr_curves",
    "heatmap_accuracy",
    "heatmap_erp",
    "scaling",
    "runtime",
)

plt.rcParams["svg.hashsalt"] = "dbm-plots"

_NO_DATE = {"Date": None}


@dataclass(frozen=True)
class Guideline:
    """One threshold overlay, in data coordinates on the a axis."""

    family: str  # "dbm" | "sbm"
    alpha: float | None  # None for the alpha-independent sbm line
    a_star: float


@dataclass(frozen=True)
class RenderResult:
    kind: str
    output_path: str
    cells: int
    guidelines: tuple[Guideline, ...] = ()
    empty: bool = False
    vector_path: str | None = None


def _finish(fig, kind, out_path, cells, guidelines, empty, vector):
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150, metadata=_NO_DATE if out_path.suffix == ".svg" else None)
    vector_path = None
    if vector and out_path.suffix != ".svg":
        vector_path = str(out_path.with_suffix(".svg"))
        fig.savefig(vector_path, metadata=_NO_DATE)
    plt.close(fig)
    return RenderResult(
        kind=kind,
        output_path=str(out_path),
        cells=cells,
        guidelines=tuple(guidelines),
        empty=empty,
        vector_path=vector_path,
    )


def _empty_figure(kind, out_path, vector):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.text(0.5, 0.5, "no data", ha="center", va="center", fontsize=18, color="gray")
    ax.set_axis_off()
    fig.suptitle(kind)
    return _finish(fig, kind, out_path, 0, (), True, vector)


def _unique_b(cells: list[CellStats]) -> float:
    return sorted({c.b for c in cells})[0]


def _series(cells, alpha):
    """Per-method (a, cell) series at one alpha, a ascending."""
    out: dict[str, list[CellStats]] = {}
    for cell in cells:
        if cell.alpha == alpha:
            out.setdefault(cell.method, []).append(cell)
    return {m: sorted(v, key=lambda c: c.a) for m, v in sorted(out.items())}


def _curves(cells, out_path, kind, value_of, ylabel, log_y, overlay, vector):
    alphas = sorted({c.alpha for c in cells})
    b = _unique_b(cells)
    fig, axes = plt.subplots(
        1, len(alphas), figsize=(4.2 * len(alphas), 3.6), squeeze=False, sharey=True
    )
    guidelines = []
    for ax, alpha in zip(axes[0], alphas):
        for method, series in _series(cells, alpha).items():
            xs = [c.a for c in series]
            ys = [value_of(c) for c in series]
            if log_y:
                ys = [y if y > 0 else np.nan for y in ys]
            ax.plot(xs, ys, marker="o", markersize=3, label=method)
        if overlay:
            dbm_star = threshold_dbm(b, alpha)
            sbm_star = threshold_sbm(b)
            guidelines.append(Guideline("dbm", alpha, dbm_star))
            ax.axvline(dbm_star, color="tab:green", linestyle="--", linewidth=1)
            ax.axvline(sbm_star, color="tab:red", linestyle=":", linewidth=1)
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel("a")
        ax.set_title(f"alpha = {alpha:g}")
        ax.grid(True, alpha=0.3)
    if overlay:
        guidelines.append(Guideline("sbm", None, threshold_sbm(b)))
    axes[0][0].set_ylabel(ylabel)
    axes[0][-1].legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finish(fig, kind, out_path, len(cells), guidelines, False, vector)


def _heatmap(cells, out_path, kind, value_of, label, method, overlay, vector):
    chosen = [c for c in cells if c.method == method]
    if not chosen:
        return _empty_figure(kind, out_path, vector)
    a_vals = sorted({c.a for c in chosen})
    alpha_vals = sorted({c.alpha for c in chosen})
    grid = np.full((len(alpha_vals), len(a_vals)), np.nan)
    for cell in chosen:
        grid[alpha_vals.index(cell.alpha), a_vals.index(cell.a)] = value_of(cell)
    b = _unique_b(chosen)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    # half-pixel padding puts cell centers at the grid coordinates
    da = (a_vals[-1] - a_vals[0]) / max(len(a_vals) - 1, 1) or 1.0
    dal = (alpha_vals[-1] - alpha_vals[0]) / max(len(alpha_vals) - 1, 1) or 1.0
    extent = (
        a_vals[0] - da / 2,
        a_vals[-1] + da / 2,
        alpha_vals[0] - dal / 2,
        alpha_vals[-1] + dal / 2,
    )
    im = ax.imshow(
        grid,
        origin="lower",
        aspect="auto",
        extent=extent,
        vmin=0.0,
        vmax=1.0,
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label=label)
    guidelines = []
    if overlay:
        dense = np.linspace(alpha_vals[0], alpha_vals[-1], 200)
        ax.plot(
            [threshold_dbm(b, al) for al in dense],
            dense,
            color="white",
            linewidth=1.5,
        )
        for alpha in alpha_vals:
            guidelines.append(Guideline("dbm", alpha, threshold_dbm(b, alpha)))
        sbm_star = threshold_sbm(b)
        ax.axvline(sbm_star, color="red", linestyle=":", linewidth=1.5)
        guidelines.append(Guideline("sbm", None, sbm_star))
    ax.set_xlabel("a")
    ax.set_ylabel("alpha")
    ax.set_title(f"{label} ({method})")
    fig.tight_layout()
    return _finish(fig, kind, out_path, len(chosen), guidelines, False, vector)


def _plot_by_size(ax, cells, value_of):
    for method in sorted({c.method for c in cells}):
        series = sorted((c for c in cells if c.method == method), key=lambda c: c.n)
        xs = [c.n for c in series]
        ys = [value_of(c) if value_of(c) > 0 else np.nan for c in series]
        ax.plot(xs, ys, marker="o", markersize=4, label=method)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.grid(True, alpha=0.3, which="both")


def _scaling(cells, out_path, vector):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
    _plot_by_size(ax1, cells, lambda c: 1.0 - c.erp)
    ax1.set_ylabel("failure probability")
    _plot_by_size(ax2, cells, lambda c: c.mean_error)
    ax2.set_ylabel("mean error")
    ax1.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finish(fig, "scaling", out_path, len(cells), (), False, vector)


def _runtime(cells, out_path, vector):
    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_by_size(ax, cells, lambda c: c.mean_runtime)
    ax.set_ylabel("mean runtime (s)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finish(fig, "runtime", out_path, len(cells), (), False, vector)


def render(
    kind: str,
    input_path,
    output_path,
    *,
    alpha: float | None = None,
    method: str = "dbm",
    overlay: bool = True,
    vector: bool = False,
) -> RenderResult:
    """Aggregate the CSV and draw one figure of the requested kind.

    alpha filters curve figures to one panel; method selects the
    heatmap slice.  overlay=False suppresses threshold guidelines.
    Raises MissingColumnsError when the CSV lacks required columns; an
    empty or fully filtered-out input produces an annotated figure.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}")
    cells = aggregate_cells(read_rows(input_path))
    if alpha is not None and kind in ("erp_curves", "logerr_curves"):
        cells = [c for c in cells if c.alpha == alpha]
    if not cells:
        return _empty_figure(kind, output_path, vector)

    if kind == "erp_curves":
        return _curves(
            cells, output_path, kind, lambda c: c.erp,
            "exact-recovery proportion", False, overlay, vector,
        )
    if kind == "logerr_curves":
        return _curves(
            cells, output_path, kind, lambda c: c.mean_error,
            "mean error", True, overlay, vector,
        )
    if kind == "heatmap_accuracy":
        return _heatmap(
            cells, output_path, kind, lambda c: 1.0 - c.mean_error,
            "mean accuracy", method, overlay, vector,
        )
    if kind == "heatmap_erp":
        return _heatmap(
            cells, output_path, kind, lambda c: c.erp,
            "exact-recovery proportion", method, overlay, vector,
        )
    if kind == "scaling":
        return _scaling(cells, output_path, vector)
    return _runtime(cells, output_path, vector)
