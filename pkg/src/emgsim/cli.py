"""Command-line entry point: run, sweep, meanfield."""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, parse_config
from .engine import run_ensemble
from .meanfield import (
    FlowParams,
    population_gap_closed_form,
    population_gap_recursion,
    population_gap_series,
    round_trip_sign,
)
from .observables import aggregate
from .params import ModelParams
from .sweep import SweepSpec, fmt, hist_filename, run_sweep, write_hist_csv, write_summary_csv

RUNS_COLUMNS = (
    "run_index",
    "mean_N_B",
    "sigma_P_A",
    "sigma_P_B",
    "mean_W_A",
    "mean_W_B",
    "trades",
    "mean_attainment",
    "mutations_A",
    "mutations_B",
    "switches",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emgsim",
        description="Two-market evolutionary minority game simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one ensemble and write CSV summaries")
    p_run.add_argument("--config", required=True, help="key=value config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--engine", choices=("auto", "numba", "python"), default="auto")

    p_sweep = sub.add_parser("sweep", help="run a parameter grid and write CSVs")
    p_sweep.add_argument("--config", required=True, help="config file with axis1/axis1_values")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--engine", choices=("auto", "numba", "python"), default="auto")

    p_mf = sub.add_parser("meanfield", help="print analytical population-gap oracles")
    p_mf.add_argument("--n0", type=float, default=None, help="first-wave size")
    p_mf.add_argument("--q", type=float, default=None, help="contraction ratio in [0,1)")
    p_mf.add_argument("--n", type=float, default=None, help="rounds (default: steady state)")
    p_mf.add_argument("--beta", type=float, default=None, help="market impact for the sign law")
    p_mf.add_argument("--regime", choices=("below", "above"), default=None,
                      help="evaluate a full impact-regime flow recursion")
    p_mf.add_argument("--agents", type=float, default=1000.0, help="N for --regime")
    return parser


def _load_config(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(f"error: cannot read config {path}: {exc}")
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise SystemExit(f"error: {path}: {exc}")


def _write_runs_csv(stats, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_COLUMNS)
        for s in stats:
            writer.writerow([
                fmt(s.run_index),
                fmt(s.mean_n_b),
                fmt(s.sigma_p_a),
                fmt(s.sigma_p_b),
                fmt(s.mean_w_a),
                fmt(s.mean_w_b),
                fmt(s.trade_count_a + s.trade_count_b),
                fmt(s.mean_attainment),
                fmt(s.mutations_a),
                fmt(s.mutations_b),
                fmt(s.switches),
            ])


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    if isinstance(cfg, SweepSpec):
        print("error: config defines a sweep; use the sweep command", file=sys.stderr)
        return 2
    params: ModelParams = cfg
    if args.seed is not None:
        params = replace(params, master_seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stats = run_ensemble(params, workers=args.workers, engine=args.engine)
    result = aggregate(stats, params)
    write_summary_csv([result], out / "summary.csv")
    write_hist_csv(result, out / hist_filename(0))
    _write_runs_csv(stats, out / "runs.csv")
    print(f"wrote {out / 'summary.csv'} ({params.n_runs} runs)")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    if not isinstance(cfg, SweepSpec):
        print("error: config defines no sweep axes; use the run command", file=sys.stderr)
        return 2
    spec: SweepSpec = cfg
    if args.seed is not None:
        spec = replace(spec, base=replace(spec.base, master_seed=args.seed))
    results = run_sweep(spec, out_dir=args.out, workers=args.workers, engine=args.engine)
    print(f"wrote {Path(args.out) / 'summary.csv'} ({len(results)} cells)")
    return 0


def _cmd_meanfield(args, parser) -> int:
    did_something = False
    try:
        if args.regime is not None:
            flow = FlowParams.for_regime(args.regime, args.agents,
                                         None if args.n is None else int(args.n))
            closed = population_gap_closed_form(flow.n0, flow.q, args.n)
            recursed = population_gap_recursion(flow)
            print(f"regime: {args.regime} (N={fmt(args.agents)}, N0={fmt(flow.n0)}, q={fmt(flow.q)})")
            print(f"closed-form gap: {fmt(closed)}")
            print(f"recursion gap:   {fmt(recursed)}")
            did_something = True
        elif args.n0 is not None or args.q is not None:
            if args.n0 is None or args.q is None:
                parser.error("--n0 and --q must be given together")
            n = args.n if args.n is not None else math.inf
            closed = population_gap_closed_form(args.n0, args.q, n)
            summed = population_gap_series(args.n0, args.q, n)
            print(f"closed-form gap: {fmt(closed)}")
            print(f"series gap:      {fmt(summed)}")
            did_something = True
        if args.beta is not None:
            print(f"round-trip sign: {round_trip_sign(args.beta)}")
            did_something = True
    except ValueError as exc:
        parser.error(str(exc))
    if not did_something:
        parser.error("give --n0/--q, --regime, or --beta")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    return _cmd_meanfield(args, parser)


if __name__ == "__main__":
    sys.exit(main())
