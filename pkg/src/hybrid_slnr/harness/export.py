"""CSV/JSON writers. Output bytes depend only on (config, seed)."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .. import __version__
from ..ga import GaTrace
from ..metrics import BeamPattern
from .config import ExperimentConfig
from .experiments import OracleRow, ResultTable

SNR_DEFINITION = "snr_db = -10*log10(noise_power); unit-norm per-node beams; CN(0,1) channel entries"

SWEEP_COLUMNS = ("scheme", "snr_db", "mean_sum_rate_bps_hz", "std_err", "n_realizations")
TRACE_COLUMNS = ("generation", "best_fitness", "mean_fitness")
BEAM_COLUMNS = ("angle_deg", "node", "gain_linear", "gain_db")
ORACLE_COLUMNS = ("run", "ga_fitness", "oracle_fitness", "hit")


def metadata(config: ExperimentConfig, kind: str, **extra) -> dict:
    meta = {
        "kind": kind,
        "config_hash": config.digest(),
        "seed": config.seed,
        "version": __version__,
        "snr_definition": SNR_DEFINITION,
    }
    meta.update(extra)
    return meta


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def to_csv(meta: dict, columns, rows) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def to_json(meta: dict, columns, rows) -> str:
    records = [dict(zip(columns, (x.item() if isinstance(x, np.generic) else x for x in r))) for r in rows]
    return json.dumps({"metadata": meta, "columns": list(columns), "rows": records}, indent=2) + "\n"


def sweep_rows(table: ResultTable):
    return [(r.scheme, r.snr_db, r.mean_sum_rate, r.std_err, r.n_realizations) for r in table.rows]


def trace_rows(trace: GaTrace):
    return [(r.generation, r.best_fitness, r.mean_fitness) for r in trace.records]


def beam_rows(pattern: BeamPattern):
    deg = np.rad2deg(pattern.angles)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(pattern.gain_per_node)
    rows = []
    for i, a in enumerate(deg):
        for l in range(pattern.gain_per_node.shape[0]):
            rows.append((float(a), l, float(pattern.gain_per_node[l, i]), float(db[l, i])))
    return rows


def oracle_rows(rows: list[OracleRow]):
    return [(r.run, r.ga_fitness, r.oracle_fitness, r.hit) for r in rows]


def write_table(path: Path, fmt: str, meta: dict, columns, rows) -> Path:
    path = Path(path).with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = to_csv(meta, columns, rows) if fmt == "csv" else to_json(meta, columns, rows)
    path.write_text(text)
    return path
