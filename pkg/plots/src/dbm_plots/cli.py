"""Command line entry point: one figure per invocation.

Usage: render --kind K --in results.csv --out fig.png [--alpha A]
[--method M] [--no-overlay] [--vector].  Prints the figure's overlay
guidelines in data coordinates to stdout (machine-parseable), one per
line.  Exit codes: 0 success (including the annotated empty figure),
2 flag errors, 3 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys

from .aggregate import MissingColumnsError
from .figures import KINDS, render

EXIT_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbm-plots", description=__doc__)
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="input", required=True, metavar="CSV")
    parser.add_argument("--out", required=True, metavar="IMAGE")
    parser.add_argument("--alpha", type=float, default=None,
                        help="restrict curve figures to one alpha")
    parser.add_argument("--method", default="dbm",
                        help="method slice for heatmaps (default dbm)")
    parser.add_argument("--no-overlay", action="store_true",
                        help="suppress threshold guidelines")
    parser.add_argument("--vector", action="store_true",
                        help="also write an SVG next to the raster")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(
            args.kind,
            args.input,
            args.out,
            alpha=args.alpha,
            method=args.method,
            overlay=not args.no_overlay,
            vector=args.vector,
        )
    except MissingColumnsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"cells {result.cells}")
    if result.empty:
        print("empty")
    for g in result.guidelines:
        where = "all" if g.alpha is None else repr(g.alpha)
        print(f"guideline {g.family} alpha={where} a={g.a_star!r}")
    print(f"wrote {result.output_path}")
    if result.vector_path:
        print(f"wrote {result.vector_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
