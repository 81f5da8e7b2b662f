"""Command-line interface.

    dbm-lab divergence ...   divergence values, rates, thresholds
    dbm-lab recover ...      one recovery run on a fresh sample
    dbm-lab experiment ...   Monte Carlo sweeps to CSV

stdout carries machine-parseable results only; progress and warnings go
to stderr.  Exit codes: 0 success, 2 argument errors, 3 numeric domain
errors, 4 refusing to touch existing partial output without --resume.
Labels are printed 1-based; everything internal is 0-based.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .divergences import (
    ch_divergence,
    chernoff_information,
    ct_divergence,
    separation_rate,
    threshold_erased,
    threshold_sbm,
    tv_distance,
)
from .experiments import (
    OutputConflictError,
    crossing_table,
    format_crossing_table,
    phase_config,
    run_sweep,
    scaling_config,
)
from .metrics import flip_invariant_error
from .model import ChannelSpec, DbmParams, erased_channel, noisy_channel, sample_dbm
from .recovery import METHODS, RefineConfig, recover

EXIT_DOMAIN = 3
EXIT_CONFLICT = 4


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x != ""])
    except ValueError:
        raise ValueError(f"could not parse vector {text!r}")


def _parse_channel(text: str, n: int, k: int) -> ChannelSpec:
    """Channel grammar: erased:ALPHA | noisy:ALPHA | file:PATH."""
    kind, _, arg = text.partition(":")
    if kind == "erased":
        return erased_channel(float(arg), n, k)
    if kind == "noisy":
        return noisy_channel(float(arg), n, k)
    if kind == "file":
        payload = json.loads(Path(arg).read_text())
        return ChannelSpec(
            np.array(payload["cond_probs"], dtype=float),
            erasure_symbol=payload.get("erasure_symbol"),
        )
    raise ValueError(f"unknown channel spec {text!r}")


def _model_params(args, parser: argparse.ArgumentParser) -> DbmParams:
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            parser.error("--a and --b must be given together")
        if args.q is not None or args.prior is not None:
            parser.error("--a/--b and --q/--prior are mutually exclusive")
        k = 2
        q = np.array([[args.a, args.b], [args.b, args.a]], dtype=float)
        prior = np.full(k, 1.0 / k)
    else:
        if args.q is None:
            parser.error("either --a/--b or --q is required")
        k = args.k
        flat = _parse_vector(args.q)
        if flat.size != k * k:
            parser.error(f"--q must have k*k = {k * k} entries")
        q = flat.reshape(k, k)
        prior = (
            _parse_vector(args.prior) if args.prior is not None else np.full(k, 1.0 / k)
        )
    channel_text = args.channel
    if channel_text is None:
        if args.alpha is None:
            parser.error("need --channel, or --alpha for the erased default")
        channel_text = f"erased:{args.alpha}"
    channel = _parse_channel(channel_text, args.n, k)
    return DbmParams(n=args.n, prior=prior, q=q, channel=channel)


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, default=1000, help="number of vertices")
    sub.add_argument("--k", type=int, default=2, help="number of communities")
    sub.add_argument("--prior", help="community prior, comma separated")
    sub.add_argument("--q", help="rate matrix, row-major comma separated")
    sub.add_argument("--a", type=float, help="within-community rate (k=2 shortcut)")
    sub.add_argument("--b", type=float, help="cross-community rate (k=2 shortcut)")
    sub.add_argument("--alpha", type=float, help="erasure exponent shortcut")
    sub.add_argument("--channel", help="erased:ALPHA | noisy:ALPHA | file:PATH")


def _cmd_divergence(args, parser) -> int:
    if args.ch is not None:
        print(repr(ch_divergence(_parse_vector(args.ch[0]), _parse_vector(args.ch[1]))))
    elif args.chernoff is not None:
        print(
            repr(
                chernoff_information(
                    _parse_vector(args.chernoff[0]), _parse_vector(args.chernoff[1])
                )
            )
        )
    elif args.tv is not None:
        print(repr(tv_distance(_parse_vector(args.tv[0]), _parse_vector(args.tv[1]))))
    elif args.ct is not None:
        print(
            repr(
                ct_divergence(
                    _parse_vector(args.ct[0]),
                    _parse_vector(args.ct[1]),
                    _parse_vector(args.ct[2]),
                    _parse_vector(args.ct[3]),
                )
            )
        )
    elif args.rate:
        params = _model_params(args, parser)
        k = params.k
        rates = np.zeros((k, k))
        for s in range(k):
            for t in range(s + 1, k):
                rates[s, t] = rates[t, s] = separation_rate(params, s, t)
        for s in range(k):
            print(" ".join(repr(float(rates[s, t])) for t in range(k)))
        worst = min(
            (rates[s, t] for s in range(k) for t in range(s + 1, k)), default=np.inf
        )
        print("PASS" if worst > 1.0 else "FAIL")
    elif args.threshold is not None:
        if args.b is None:
            parser.error("--threshold requires --b")
        if args.threshold == "erased":
            if args.alpha is None:
                parser.error("--threshold erased requires --alpha")
            print(f"dbm {threshold_erased(args.b, args.alpha)!r}")
            print(f"sbm {threshold_sbm(args.b)!r}")
        else:
            print(f"sbm {threshold_sbm(args.b)!r}")
    else:
        parser.error(
            "choose one of --ch, --chernoff, --tv, --ct, --rate, --threshold"
        )
    return 0


def _cmd_recover(args, parser) -> int:
    params = _model_params(args, parser)
    if args.method not in METHODS:
        parser.error(f"--method must be one of {', '.join(METHODS)}")
    config = RefineConfig(
        gamma=args.gamma,
        epsilon=args.epsilon,
        t_max=args.t_max,
    )
    sample = sample_dbm(params, args.seed)
    result = recover(sample, params, args.method, config, args.seed)
    outcome = flip_invariant_error(result.labels, sample.labels, params.k)
    print(f"error {outcome.error!r}")
    print(f"exact {1 if outcome.exact else 0}")
    print(f"iterations {result.iterations}")
    if args.out is not None:
        with open(args.out, "w") as fh:
            for lab in result.labels:
                fh.write(f"{int(lab) + 1}\n")
    return 0


def _cmd_experiment(args, parser) -> int:
    overrides = {}
    if args.config is not None:
        overrides = json.loads(Path(args.config).read_text())

    def pick(name, flag_value, cast=None):
        value = overrides.get(name, flag_value)
        return cast(value) if (cast is not None and value is not None) else value

    kind = pick("kind", args.kind)
    n_list = pick("n_list", _ints(args.n_list) if args.n_list else None)
    a_list = pick("a_list", _floats(args.a_list) if args.a_list else None)
    alpha_list = pick("alpha_list", _floats(args.alpha_list) if args.alpha_list else None)
    b = pick("b", args.b if args.b is not None else 10.0, float)
    methods = pick("methods", args.methods.split(",") if args.methods else None)
    replicates = pick("replicates", args.replicates, int)
    base_seed = pick("base_seed", args.base_seed, int)
    out = pick("out", args.out)
    workers = pick("workers", args.workers, int)
    gamma = pick("gamma", args.gamma)
    refine = RefineConfig(gamma=gamma)

    if out is None:
        parser.error("--out is required")
    if kind == "scaling":
        config = scaling_config(
            n_list=n_list or (10, 100, 1000, 10000),
            b=b,
            alpha=(alpha_list or [0.3])[0],
            methods=methods or ("dbm", "sbm"),
            replicates=replicates,
            base_seed=base_seed,
            refine=refine,
            output_path=out,
        )
        if a_list:
            config = dataclasses.replace(config, a_list=tuple(a_list))
    else:
        config = phase_config(
            n=(n_list or [1000])[0],
            a_list=a_list or tuple(range(14, 24)),
            b=b,
            alpha_list=alpha_list or (0.2, 0.4, 0.6, 0.8),
            methods=methods or ("dbm", "dbm_iter", "sbm", "sbm_iter", "spectral", "data_only"),
            replicates=replicates,
            base_seed=base_seed,
            refine=refine,
            output_path=out,
        )

    total_cells = (
        len(config.n_list)
        * len(config.a_list)
        * len(config.alpha_list)
        * config.replicates
        * len(config.methods)
    )

    def progress(done):
        print(f"{done}/{total_cells} records", file=sys.stderr)

    records = run_sweep(
        config,
        resume=args.resume,
        workers=workers,
        progress=progress if args.verbose else None,
    )
    print(f"records {len(records)}", file=sys.stderr)
    if kind == "phase":
        print(format_crossing_table(crossing_table(records, level=args.level)))
    return 0


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbm-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    div = subs.add_parser("divergence", help="divergence values and thresholds")
    div.add_argument("--ch", nargs=2, metavar=("A", "B"))
    div.add_argument("--chernoff", nargs=2, metavar=("P", "Q"))
    div.add_argument("--tv", nargs=2, metavar=("P", "Q"))
    div.add_argument("--ct", nargs=4, metavar=("P1", "Q1", "P2", "Q2"))
    div.add_argument("--rate", action="store_true", help="pairwise separation rates")
    div.add_argument("--threshold", choices=["erased", "sbm"])
    _add_model_flags(div)

    rec = subs.add_parser("recover", help="single recovery run")
    _add_model_flags(rec)
    rec.add_argument("--method", required=True)
    rec.add_argument("--seed", type=int, default=0)
    rec.add_argument("--gamma", type=float, default=None)
    rec.add_argument("--epsilon", type=float, default=1e-3)
    rec.add_argument("--t-max", dest="t_max", type=int, default=5)
    rec.add_argument("--out", help="write recovered labels (1-based) here")

    exp = subs.add_parser("experiment", help="Monte Carlo sweep to CSV")
    exp.add_argument("--kind", choices=["phase", "scaling"], default="phase")
    exp.add_argument("--n-list", dest="n_list")
    exp.add_argument("--a-list", dest="a_list")
    exp.add_argument("--alpha-list", dest="alpha_list")
    exp.add_argument("--b", type=float)
    exp.add_argument("--methods")
    exp.add_argument("--replicates", type=int, default=100)
    exp.add_argument("--base-seed", dest="base_seed", type=int, default=0)
    exp.add_argument("--out")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--resume", action="store_true")
    exp.add_argument("--gamma", type=float, default=None)
    exp.add_argument("--level", type=float, default=0.95)
    exp.add_argument("--config", help="JSON config overriding flags")
    exp.add_argument("--verbose", action="store_true")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "divergence":
            return _cmd_divergence(args, parser)
        if args.command == "recover":
            return _cmd_recover(args, parser)
        if args.command == "experiment":
            return _cmd_experiment(args, parser)
    except OutputConflictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    parser.error("no command")


if __name__ == "__main__":
    sys.exit(main())
