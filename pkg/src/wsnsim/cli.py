"""Command line interface.

Subcommands:
  run        one config, single seed: CSV + summary + figures
  sweep      multi-seed batch over the configured protocol variants
  summarize  recompute summary and figures from existing run CSVs

Exit codes: 0 success, 1 configuration error, 2 runtime/I-O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ExperimentSpec, parse_config
from .engine import ConfigError
from .experiment import SummaryStats, run_experiment, summarize


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="experiment config file (key = value lines)")
    p.add_argument("--out", type=Path, help="output directory (default $WSN_SIM_OUT or ./out)")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--seeds", type=int, help="number of seeds (base_seed + i)")
    p.add_argument("--protocols", help="comma-separated variants, e.g. sep,sep-ach")
    p.add_argument("--jobs", type=int, help="concurrent simulation workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsnsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run a single-seed experiment"),
        ("sweep", "run the full multi-seed batch"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    p = sub.add_parser("summarize", help="recompute stats from existing CSVs")
    p.add_argument("--out", type=Path, help="directory holding run CSVs")
    return parser


def _load_spec(args) -> ExperimentSpec:
    spec = parse_config(args.config) if args.config else ExperimentSpec()
    if args.seed is not None:
        spec.base.seed = args.seed
        spec.seeds = [args.seed + i for i in range(len(spec.seeds))]
    if args.seeds is not None:
        spec.seeds = [spec.base.seed + i for i in range(args.seeds)]
    if args.protocols:
        spec.variants = [v.strip() for v in args.protocols.split(",") if v.strip()]
    if args.out is not None:
        spec.out_dir = args.out
    if args.jobs is not None:
        spec.jobs = args.jobs
    spec.validate()
    return spec


def _print_stats(stats: SummaryStats):
    for s in stats.per_run:
        print(
            f"{s.variant} seed={s.seed}: first_death={s.first_death_round} "
            f"last_death={s.last_death_round} packets_to_bs={s.final_packets_to_bs}"
        )
    for variant, agg in stats.aggregates.items():
        line = (
            f"{variant}: first_death median={agg['first_death_median']} "
            f"[{agg['first_death_min']}, {agg['first_death_max']}] "
            f"packets_to_bs median={agg['final_packets_to_bs_median']}"
        )
        if "first_death_delta_median" in agg:
            line += f" delta_vs_baseline median={agg['first_death_delta_median']}"
        print(line)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "summarize":
            out = args.out if args.out is not None else ExperimentSpec().out_dir
            stats = summarize(out)
        else:
            spec = _load_spec(args)
            if args.command == "run":
                spec.seeds = [spec.base.seed]
            stats = run_experiment(spec)
        _print_stats(stats)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
