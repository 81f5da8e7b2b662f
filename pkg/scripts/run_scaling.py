#!/usr/bin/env python3
"""Finite-size scaling sweep: n in {10, 100, 1000, 10000}.

Rates pinned 10% above the recovery threshold at (b, alpha) = (10, 0.3),
1000 replicates per cell for dbm/dbm_iter/sbm/sbm_iter.  The n=10000
cells dominate the runtime; drop them with --n-list for a quick pass.
"""

import argparse
import sys

from dbm_lab.experiments import run_scaling, scaling_config


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="scaling_results.csv")
    ap.add_argument("--replicates", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--base-seed", type=int, default=0)
    ap.add_argument("--resume", action="store_true")
    ap.add_argument(
        "--n-list", default="10,100,1000,10000",
        help="comma separated sizes",
    )
    args = ap.parse_args()

    config = scaling_config(
        n_list=tuple(int(x) for x in args.n_list.split(",") if x),
        methods=("dbm", "dbm_iter", "sbm", "sbm_iter"),
        replicates=args.replicates,
        base_seed=args.base_seed,
        output_path=args.out,
    )
    total = (
        len(config.n_list) * config.replicates * len(config.methods)
    )

    def progress(done):
        print(f"\r{done}/{total} records", end="", file=sys.stderr, flush=True)

    records = run_scaling(
        config, resume=args.resume, workers=args.workers, progress=progress
    )
    print(file=sys.stderr)
    for n in config.n_list:
        for method in config.methods:
            sel = [r for r in records if r.n == n and r.method == method]
            erp = sum(r.exact for r in sel) / len(sel)
            mean_err = sum(r.error for r in sel) / len(sel)
            print(f"n={n:>6} {method:<10} erp={erp:.3f} mean_error={mean_err:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
