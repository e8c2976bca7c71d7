"""Best and mean GA fitness per generation, averaged over several seeds."""

from pathlib import Path

import numpy as np
from _common import load, parser

from hybrid_slnr.harness import export
from hybrid_slnr.harness.experiments import run_convergence_trace


def main():
    p = parser(__doc__, "convergence.json")
    p.add_argument("--runs", type=int, default=10, help="number of seeds, starting at the config seed")
    args = p.parse_args()
    base = load(args)

    best, mean = [], []
    for i in range(args.runs):
        config = base.replace(seed=base.seed + i)
        trace = run_convergence_trace(config)
        best.append(trace.best)
        mean.append(trace.mean)
        if i == 0:
            export.write_table(
                Path(config.output_dir) / "trace", "csv", export.metadata(config, "trace"),
                export.TRACE_COLUMNS, export.trace_rows(trace),
            )
    best, mean = np.mean(best, axis=0), np.mean(mean, axis=0)
    last = len(best) - 1
    print(f"{'gen':>5}{'best':>10}{'mean':>10}")
    for g in sorted({0, 25, 50, 100, 150, last} & set(range(last + 1))):
        print(f"{g:5d}{best[g]:10.4f}{mean[g]:10.4f}")
    if last >= 150:
        print(f"gain from gen 150 to {last}: {100 * (best[last] - best[150]) / best[150]:.3f}%")


if __name__ == "__main__":
    main()
