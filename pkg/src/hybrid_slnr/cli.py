"""Command-line entry point: ``hybrid-slnr {sweep,trace,beams,oracle-check}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ContractError, NumericalError, SingularChannelError
from .ga import EvolutionError
from .harness import config as cfg
from .harness import export
from .harness.experiments import run_beam_pattern, run_convergence_trace, run_oracle_check, run_sum_rate_sweep

DEFAULTS = {
    "sweep": cfg.sum_rate_config,
    "trace": cfg.convergence_config,
    "beams": cfg.beam_config,
    "oracle-check": cfg.oracle_config,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybrid-slnr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config (default: the stock setup)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo runs")
    common.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("sweep", parents=[common], help="mean sum rate vs SNR per scheme")
    p = sub.add_parser("trace", parents=[common], help="GA fitness per generation")
    p.add_argument("--snr-db", type=float)
    p = sub.add_parser("beams", parents=[common], help="beam patterns for LoS nodes")
    p.add_argument("--snr-db", type=float)
    p = sub.add_parser("oracle-check", parents=[common], help="GA vs exhaustive search hit rate")
    p.add_argument("--snr-db", type=float)
    return parser


def _load(args) -> cfg.ExperimentConfig:
    config = cfg.load_config(args.config) if args.config else DEFAULTS[args.command]()
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        config = config.replace(seed=args.seed)
    return config


def _run(args) -> int:
    config = _load(args)
    out = args.out if args.out is not None else Path(config.output_dir)
    fmt = args.format
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")

    if args.command == "sweep":
        table = run_sum_rate_sweep(config, workers=args.workers)
        path = export.write_table(
            out / "sweep", fmt, export.metadata(config, "sweep"), export.SWEEP_COLUMNS, export.sweep_rows(table)
        )
        print(f"sweep: {len(table.rows)} rows, {config.n_channel_realizations} realizations -> {path}")
        for r in table.rows:
            print(f"  {r.scheme:<13} {r.snr_db:+6.1f} dB  {r.mean_sum_rate:8.4f} +- {r.std_err:.4f} bps/Hz")

    elif args.command == "trace":
        trace = run_convergence_trace(config, snr_db=args.snr_db)
        path = export.write_table(
            out / "trace", fmt, export.metadata(config, "trace"), export.TRACE_COLUMNS, export.trace_rows(trace)
        )
        print(f"trace: {len(trace)} generations, best {trace.best[0]:.4f} -> {trace.best[-1]:.4f} -> {path}")

    elif args.command == "beams":
        result = run_beam_pattern(config, snr_db=args.snr_db)
        for scheme, pattern in result.patterns.items():
            meta = export.metadata(config, "beams", scheme=scheme, node_angles_deg=list(result.node_angles_deg))
            path = export.write_table(out / f"beams_{scheme}", fmt, meta, export.BEAM_COLUMNS, export.beam_rows(pattern))
            side = result.sidelobes[scheme]
            print(f"beams[{scheme}]: strongest sidelobe {side.max():.3f} (linear) -> {path}")

    else:
        rows = run_oracle_check(config, snr_db=args.snr_db, workers=args.workers)
        path = export.write_table(
            out / "oracle", fmt, export.metadata(config, "oracle-check"), export.ORACLE_COLUMNS, export.oracle_rows(rows)
        )
        hits = sum(r.hit for r in rows)
        exceed = sum(r.ga_fitness > r.oracle_fitness * (1 + 1e-9) for r in rows)
        print(f"oracle-check: GA hit the exhaustive maximum in {hits}/{len(rows)} runs "
              f"({100.0 * hits / len(rows):.1f}%), exceeded it in {exceed} -> {path}")
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, ContractError) as exc:
        print(f"hybrid-slnr {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, SingularChannelError, EvolutionError, ArithmeticError) as exc:
        print(f"hybrid-slnr {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
