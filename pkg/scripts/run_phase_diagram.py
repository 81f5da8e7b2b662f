#!/usr/bin/env python3
"""Full phase-diagram sweep: a in 14..23, alpha in {0.2,0.4,0.6,0.8}.

All six methods, 1000 replicates per cell at n=1000, b=10.  Writes
results.csv plus a .meta.json sidecar and prints the 95% crossing
table.  Expect hours of wall clock single-worker; pass --workers to
spread over cores, --resume to continue an interrupted run.
"""

import argparse
import sys

from dbm_lab.experiments import (
    crossing_table,
    format_crossing_table,
    phase_config,
    run_phase_diagram,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="phase_results.csv")
    ap.add_argument("--replicates", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--base-seed", type=int, default=0)
    ap.add_argument("--resume", action="store_true")
    args = ap.parse_args()

    config = phase_config(
        replicates=args.replicates,
        base_seed=args.base_seed,
        output_path=args.out,
    )
    total = (
        len(config.a_list) * len(config.alpha_list)
        * config.replicates * len(config.methods)
    )

    def progress(done):
        print(f"\r{done}/{total} records", end="", file=sys.stderr, flush=True)

    records = run_phase_diagram(
        config, resume=args.resume, workers=args.workers, progress=progress
    )
    print(file=sys.stderr)
    print(format_crossing_table(crossing_table(records, level=0.95)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
