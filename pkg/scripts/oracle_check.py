"""How often the GA finds the exhaustive-search optimum on a small array."""

from pathlib import Path

from _common import load, parser

from hybrid_slnr.harness import export
from hybrid_slnr.harness.experiments import run_oracle_check


def main():
    p = parser(__doc__, "oracle.json")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    config = load(args)
    rows = run_oracle_check(config, workers=args.workers)
    path = export.write_table(
        Path(config.output_dir) / "oracle", "csv", export.metadata(config, "oracle-check"),
        export.ORACLE_COLUMNS, export.oracle_rows(rows),
    )
    hits = sum(r.hit for r in rows)
    worst = min(r.ga_fitness / r.oracle_fitness for r in rows if r.oracle_fitness > 0)
    print(f"{hits}/{len(rows)} runs reached the optimum; worst GA/optimum ratio {worst:.4f} -> {path}")


if __name__ == "__main__":
    main()
