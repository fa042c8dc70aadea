"""Command line entry point.

Subcommands::

    cpdsss sweep --config cfg.json [--seed 7] [--out results.csv] [--plot out.svg]
    cpdsss fig1|fig2|fig3 [--trials 20] [--full] [--out fig1.csv] [--plot fig1.svg]
    cpdsss validate
    cpdsss dump-channels --k 32 --m 4 --trials 2 --out channels.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .channel import ChannelProfile, draw_channel_set, write_channels_csv


def _add_run_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="per-record CSV path; aggregates go to <stem>_aggregate.csv")
    p.add_argument("--plot", help="write an SVG of capacity vs SNR")
    p.add_argument("--workers", type=int, help=f"worker threads (env {harness.THREADS_ENV} wins)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpdsss", description="Multi-user CP-DSSS capacity simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a JSON sweep config")
    p.add_argument("--config", required=True)
    _add_run_opts(p)

    for name in ("fig1", "fig2", "fig3"):
        p = sub.add_parser(name, help=f"built-in sweep for {name}")
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--full", action="store_true", help="raise trial count to at least 500")
        p.add_argument("--frames", type=int, default=1, help="frames per trial")
        _add_run_opts(p)

    sub.add_parser("validate", help="run dense-oracle and invariant checks")

    p = sub.add_parser("dump-channels", help="write random channel sets as CSV")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--l-h", type=int, default=130)
    p.add_argument("--tau", type=float, default=25.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _run(cfg: harness.SweepConfig, args) -> int:
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = args.out or cfg.output
    if args.plot and out is None:
        print("--plot needs --out", file=sys.stderr)
        return 2
    result = harness.run_sweep(cfg, workers=args.workers, output=out)
    for a in result.aggregates:
        print(
            f"{a['direction']} {a['csi_mode']:9s} K={a['k']:<3d} M={a['m']:<3d} SNR={a['snr_db']:6.1f} dB  "
            f"C={a['mean_capacity_bpcu']:.5g} (ideal {a['mean_ideal_bpcu']:.5g}) bits/use"
        )
    if args.plot:
        from .plotting import plot_aggregate

        plot_aggregate(harness.aggregate_path(out), args.plot)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.command == "sweep":
            return _run(harness.load_config(args.config), args)
        if args.command in ("fig1", "fig2", "fig3"):
            cfg = harness.figure_config(args.command, trials=args.trials, full=args.full,
                                        frames_per_trial=args.frames)
            return _run(cfg, args)
        if args.command == "validate":
            from .validation import run_all

            return 0 if run_all() else 1
        if args.command == "dump-channels":
            profile = ChannelProfile(l_h=args.l_h, tau=args.tau)
            sets = {
                t: draw_channel_set(args.k, args.m, profile,
                                    np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(0, args.k, args.m, t))))
                for t in range(args.trials)
            }
            write_channels_csv(args.out, sets)
            return 0
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
