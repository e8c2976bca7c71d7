"""Gain-vs-angle tables for digital and hybrid SLNR toward LoS nodes."""

from pathlib import Path

import numpy as np
from _common import load, parser

from hybrid_slnr.harness import export
from hybrid_slnr.harness.experiments import run_beam_pattern


def main():
    args = parser(__doc__, "beams.json").parse_args()
    config = load(args)
    result = run_beam_pattern(config)
    for scheme, pat in result.patterns.items():
        meta = export.metadata(config, "beams", scheme=scheme, node_angles_deg=list(result.node_angles_deg))
        path = export.write_table(
            Path(config.output_dir) / f"beams_{scheme}", "csv", meta, export.BEAM_COLUMNS, export.beam_rows(pat)
        )
        peaks = np.rad2deg(pat.angles[np.argmax(pat.gain_per_node, axis=1)])
        print(f"{scheme}: peaks at {np.round(peaks, 2).tolist()} deg, "
              f"strongest sidelobe {result.sidelobes[scheme].max():.3f} -> {path}")


if __name__ == "__main__":
    main()
