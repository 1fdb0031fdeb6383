"""Batch experiment driver: run (variant x seed) grids, emit per-run CSVs,
a summary table and comparison figures."""

from __future__ import annotations

import re
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentSpec, write_resolved_config
from .engine import RoundMetrics, Simulation
from .plots import plot_metric

CSV_HEADER = (
    "round,alive,dead,ch_count,packets_to_bs_cum,packets_to_ch_cum,total_residual_energy_j"
)

_RUN_CSV_RE = re.compile(r"^(?P<variant>[a-z]+(?:-ach)?)_seed(?P<seed>-?\d+)\.csv$")


@dataclass
class RunSummary:
    variant: str
    seed: int
    first_death_round: int
    last_death_round: int
    final_packets_to_bs: int
    final_packets_to_ch: int


@dataclass
class SummaryStats:
    per_run: list[RunSummary]
    # variant -> {"first_death_min": ..., "first_death_median": ..., ...}
    aggregates: dict[str, dict[str, float]]
    # ach variant -> {seed: first-death delta vs matched baseline run}
    first_death_deltas: dict[str, dict[int, int]] = field(default_factory=dict)


def format_metrics_csv(metrics: list[RoundMetrics]) -> str:
    lines = [CSV_HEADER]
    for m in metrics:
        lines.append(
            f"{m.round},{m.alive},{m.dead},{m.ch_count},"
            f"{m.packets_to_bs_cum},{m.packets_to_ch_cum},{m.total_residual_energy_j!r}"
        )
    return "\n".join(lines) + "\n"


def run_csv_path(out_dir: Path, variant: str, seed: int) -> Path:
    return Path(out_dir) / f"{variant}_seed{seed}.csv"


def _run_one(args):
    spec, variant, seed = args
    result = Simulation(spec.config_for(variant, seed)).run()
    path = run_csv_path(spec.out_dir, variant, seed)
    path.write_text(format_metrics_csv(result.rounds))
    summary = RunSummary(
        variant=variant,
        seed=seed,
        first_death_round=result.first_death_round,
        last_death_round=result.last_death_round,
        final_packets_to_bs=result.final_packets_to_bs,
        final_packets_to_ch=result.final_packets_to_ch,
    )
    alive = np.array([m.alive for m in result.rounds], dtype=np.int64)
    packets = np.array([m.packets_to_bs_cum for m in result.rounds], dtype=np.int64)
    return summary, alive, packets


def run_experiment(spec: ExperimentSpec) -> SummaryStats:
    """Run every (variant, seed) cell, write all output files, and return
    the aggregate statistics."""
    spec.validate()
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_resolved_config(spec, out / "resolved_config.txt")

    tasks = [(spec, v, s) for v in spec.variants for s in spec.seeds]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            outputs = list(pool.map(_run_one, tasks))
    else:
        outputs = [_run_one(t) for t in tasks]

    summaries = [o[0] for o in outputs]
    alive_series = {(s.variant, s.seed): a for (s, a, _) in outputs}
    packet_series = {(s.variant, s.seed): p for (s, _, p) in outputs}
    return _finalize(out, spec.variants, spec.seeds, summaries, alive_series, packet_series)


def _finalize(out, variants, seeds, summaries, alive_series, packet_series) -> SummaryStats:
    by_run = {(s.variant, s.seed): s for s in summaries}

    deltas: dict[str, dict[int, int]] = {}
    for v in variants:
        if v.endswith("-ach") and v.removesuffix("-ach") in variants:
            base = v.removesuffix("-ach")
            deltas[v] = {
                sd: by_run[(v, sd)].first_death_round - by_run[(base, sd)].first_death_round
                for sd in seeds
            }

    aggregates: dict[str, dict[str, float]] = {}
    for v in variants:
        fd = [by_run[(v, sd)].first_death_round for sd in seeds]
        ld = [by_run[(v, sd)].last_death_round for sd in seeds]
        bs = [by_run[(v, sd)].final_packets_to_bs for sd in seeds]
        ch = [by_run[(v, sd)].final_packets_to_ch for sd in seeds]
        agg = {
            "first_death_min": min(fd),
            "first_death_median": statistics.median(fd),
            "first_death_max": max(fd),
            "last_death_median": statistics.median(ld),
            "final_packets_to_bs_median": statistics.median(bs),
            "final_packets_to_ch_median": statistics.median(ch),
        }
        if v in deltas:
            agg["first_death_delta_median"] = statistics.median(deltas[v].values())
        aggregates[v] = agg

    _write_summary_csv(Path(out) / "summary.csv", variants, seeds, by_run, deltas)
    plot_metric(
        _group(alive_series, variants),
        ylabel="alive nodes",
        title="Network lifetime (median over seeds)",
        path=Path(out) / "alive_vs_round.svg",
    )
    plot_metric(
        _group(packet_series, variants),
        ylabel="cumulative packets to BS",
        title="Throughput to BS (median over seeds)",
        path=Path(out) / "packets_vs_round.svg",
    )
    return SummaryStats(per_run=summaries, aggregates=aggregates, first_death_deltas=deltas)


def _group(series, variants):
    return {v: [arr for (vv, _), arr in series.items() if vv == v] for v in variants}


def _write_summary_csv(path, variants, seeds, by_run, deltas):
    header = (
        "protocol,seed,first_death_round,last_death_round,"
        "final_packets_to_bs,final_packets_to_ch,first_death_delta_vs_baseline"
    )
    lines = [header]
    for v in variants:
        for sd in seeds:
            s = by_run[(v, sd)]
            delta = deltas.get(v, {}).get(sd, "")
            lines.append(
                f"{v},{sd},{s.first_death_round},{s.last_death_round},"
                f"{s.final_packets_to_bs},{s.final_packets_to_ch},{delta}"
            )
    for v in variants:
        fd = [by_run[(v, sd)].first_death_round for sd in seeds]
        ld = [by_run[(v, sd)].last_death_round for sd in seeds]
        bs = [by_run[(v, sd)].final_packets_to_bs for sd in seeds]
        ch = [by_run[(v, sd)].final_packets_to_ch for sd in seeds]
        dl = list(deltas[v].values()) if v in deltas else None
        for label, fn in (("min", min), ("median", statistics.median), ("max", max)):
            lines.append(
                f"{v},{label},{_num(fn(fd))},{_num(fn(ld))},{_num(fn(bs))},{_num(fn(ch))},"
                f"{_num(fn(dl)) if dl else ''}"
            )
    Path(path).write_text("\n".join(lines) + "\n")


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def summarize(out_dir) -> SummaryStats:
    """Recompute summary.csv and the comparison figures from existing
    per-run CSV files in `out_dir`."""
    out = Path(out_dir)
    runs = []
    for p in sorted(out.iterdir()):
        m = _RUN_CSV_RE.match(p.name)
        if m:
            runs.append((m.group("variant"), int(m.group("seed")), p))
    if not runs:
        raise FileNotFoundError(f"no run CSV files found in {out}")

    summaries = []
    alive_series = {}
    packet_series = {}
    for variant, seed, path in runs:
        rows = path.read_text().splitlines()
        if rows[0] != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header")
        data = [row.split(",") for row in rows[1:]]
        alive = np.array([int(r[1]) for r in data], dtype=np.int64)
        dead = np.array([int(r[2]) for r in data], dtype=np.int64)
        bs = np.array([int(r[4]) for r in data], dtype=np.int64)
        ch = np.array([int(r[5]) for r in data], dtype=np.int64)
        first_death = int(np.argmax(dead > 0)) if (dead > 0).any() else -1
        last_death = int(np.argmax(alive == 0)) if (alive == 0).any() else -1
        summaries.append(
            RunSummary(variant, seed, first_death, last_death, int(bs[-1]), int(ch[-1]))
        )
        alive_series[(variant, seed)] = alive
        packet_series[(variant, seed)] = bs

    variants = sorted({s.variant for s in summaries}, key=_variant_order)
    seeds = sorted({s.seed for s in summaries})
    present = {(s.variant, s.seed) for s in summaries}
    missing = [(v, sd) for v in variants for sd in seeds if (v, sd) not in present]
    if missing:
        raise ValueError(f"incomplete run grid in {out}: missing {missing}")
    return _finalize(out, variants, seeds, summaries, alive_series, packet_series)


def _variant_order(v: str):
    from .config import VARIANTS

    return VARIANTS.index(v) if v in VARIANTS else len(VARIANTS)
