"""Mean sum rate vs SNR for digital/hybrid SLNR and ZF.

    python scripts/sum_rate_vs_snr.py --workers 4
    python scripts/sum_rate_vs_snr.py --config scripts/configs/sum_rate_2bit.json
"""

import logging
from pathlib import Path

from _common import load, parser

from hybrid_slnr.harness import export
from hybrid_slnr.harness.experiments import run_sum_rate_sweep


def main():
    p = parser(__doc__.splitlines()[0], "sum_rate.json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--realizations", type=int, help="override n_channel_realizations")
    args = p.parse_args()
    logging.basicConfig(level=logging.WARNING)
    config = load(args, **({"n_channel_realizations": args.realizations} if args.realizations else {}))

    table = run_sum_rate_sweep(config, workers=args.workers)
    path = export.write_table(
        Path(config.output_dir) / "sweep", "csv", export.metadata(config, "sweep"),
        export.SWEEP_COLUMNS, export.sweep_rows(table),
    )

    print(f"{'snr_db':>7}" + "".join(f"{s:>15}" for s in config.schemes) + "   hybrid/digital")
    for snr in config.snr_grid_db:
        rates = {s: table.row(s, snr).mean_sum_rate for s in config.schemes}
        line = f"{snr:7.1f}" + "".join(f"{rates[s]:15.4f}" for s in config.schemes)
        if "hybrid_slnr" in rates and "digital_slnr" in rates:
            line += f"   {rates['hybrid_slnr'] / rates['digital_slnr']:.3f}"
        print(line)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
