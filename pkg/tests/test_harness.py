import csv
import io
import json

import numpy as np
import pytest

from hybrid_slnr.errors import ConfigError
from hybrid_slnr.ga import GaConfig
from hybrid_slnr.harness import config as cfg
from hybrid_slnr.harness import export
from hybrid_slnr.harness.experiments import (
    draw_channels,
    noise_power,
    run_beam_pattern,
    run_convergence_trace,
    run_oracle_check,
    run_scheme,
    run_sum_rate_sweep,
)
from hybrid_slnr.streams import make_stream

SMALL_GA = GaConfig(population_size=10, max_generations=15)


def small(**overrides):
    base = dict(snr_grid_db=(-6.0, 6.0), n_channel_realizations=6, ga=SMALL_GA)
    return cfg.ExperimentConfig(**{**base, **overrides})


# -- config -------------------------------------------------------------------------


def test_config_defaults():
    c = cfg.ExperimentConfig()
    assert (c.n_tx, c.n_rf, c.n_users, c.resolution_bits) == (8, 3, 3, 1)
    assert c.snr_grid_db == tuple(float(x) for x in range(-12, 13, 3))
    assert c.n_channel_realizations == 500 and c.rx_antennas == (1, 1, 1)
    assert c.ga.population_size == 50 and c.ga.max_generations == 200


def test_config_round_trip(tmp_path):
    for c in (cfg.sum_rate_config(), cfg.convergence_config(), cfg.beam_config(), cfg.oracle_config(seed=9)):
        assert cfg.ExperimentConfig.from_dict(c.to_dict()) == c
        path = tmp_path / "c.json"
        cfg.save_config(c, path)
        assert cfg.load_config(path) == c
        assert cfg.load_config(path).digest() == c.digest()


def test_config_digest_tracks_content():
    assert cfg.sum_rate_config().digest() != cfg.sum_rate_config(seed=1).digest()


@pytest.mark.parametrize(
    "patch",
    [
        {"bogus": 1},
        {"ga": {"population_size": 10, "tournament": 3}},
        {"array": {"n_elements": 8, "curvature": 0.1}},
    ],
)
def test_config_rejects_unknown_keys(patch):
    d = cfg.sum_rate_config().to_dict()
    d.update(patch)
    with pytest.raises(ConfigError, match="unknown"):
        cfg.ExperimentConfig.from_dict(d)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_rf=2),  # fewer RF chains than users
        dict(n_rf=9),
        dict(rx_antennas=(2, 1, 1)),  # ZF schemes in the default set
        dict(rx_antennas=(1, 1)),
        dict(channel_model="los_ula"),
        dict(channel_model="ricean"),
        dict(los_angles_deg=(0.0, 10.0)),
        dict(schemes=("digital_slnr", "hybrid_mmse")),
        dict(schemes=()),
        dict(snr_grid_db=()),
        dict(n_channel_realizations=0),
        dict(ga={"population_size": 7}),
        dict(array={"n_elements": 4}),
        dict(seed=-1),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        cfg.ExperimentConfig(**kwargs)


def test_multi_antenna_slnr_only_is_valid():
    c = cfg.ExperimentConfig(rx_antennas=(2, 1, 1), schemes=("digital_slnr", "hybrid_slnr"))
    assert c.rx_antennas == (2, 1, 1)


def test_config_pushes_bits_and_seed_into_ga():
    c = cfg.ExperimentConfig(resolution_bits=2, seed=7)
    assert c.ga.resolution_bits == 2 and c.ga.seed == 7


def test_load_config_names_missing_path(tmp_path):
    with pytest.raises(ConfigError, match="missing.json"):
        cfg.load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="bad.json"):
        cfg.load_config(bad)


# -- sweeps -------------------------------------------------------------------------


def test_noise_power():
    assert noise_power(0.0) == 1.0
    assert noise_power(10.0) == pytest.approx(0.1)
    assert noise_power(-12.0) == pytest.approx(10**1.2)


def test_single_user_digital_closed_form():
    c = cfg.ExperimentConfig(n_rf=1, n_users=1, snr_grid_db=(0.0,), n_channel_realizations=1, schemes=("digital_slnr",))
    table = run_sum_rate_sweep(c)
    h = draw_channels(c, 0)[0].entries
    assert table.rows[0].mean_sum_rate == pytest.approx(np.log2(1 + np.linalg.norm(h) ** 2 / 1.0), rel=1e-12)


def test_channel_draws_are_seeded_and_shared():
    c = small()
    a, b = draw_channels(c, 3), draw_channels(c, 3)
    assert all(np.array_equal(x.entries, y.entries) for x, y in zip(a, b))
    assert not np.array_equal(draw_channels(c, 4)[0].entries, a[0].entries)


def test_sweep_structure_and_standard_error():
    c = small()
    table = run_sum_rate_sweep(c)
    assert len(table.rows) == len(c.schemes) * len(c.snr_grid_db)
    keys = [(r.scheme, r.snr_db) for r in table.rows]
    assert keys == sorted(keys)
    for r in table.rows:
        x = table.samples[(r.scheme, r.snr_db)]
        assert r.n_realizations == len(x) == c.n_channel_realizations
        assert r.mean_sum_rate == pytest.approx(np.mean(x))
        assert r.std_err == pytest.approx(np.std(x, ddof=1) / np.sqrt(len(x)))
        assert np.all(x >= 0)


def test_sweep_independent_of_workers():
    c = small(n_channel_realizations=4)
    a = run_sum_rate_sweep(c, workers=1)
    b = run_sum_rate_sweep(c, workers=2)
    assert a.rows == b.rows


def test_hybrid_mean_not_above_digital():
    c = small(n_channel_realizations=20, schemes=("digital_slnr", "hybrid_slnr"))
    table = run_sum_rate_sweep(c)
    for snr in c.snr_grid_db:
        d, h = table.row("digital_slnr", snr), table.row("hybrid_slnr", snr)
        assert h.mean_sum_rate <= d.mean_sum_rate + 2 * np.hypot(d.std_err, h.std_err)


def test_hybrid_designed_precoders_meet_power_constraint():
    c = small()
    channels = draw_channels(c, 0)
    for scheme in c.schemes:
        out = run_scheme(scheme, channels, c, noise_power(3.0), make_stream(1))
        if out.precoders is None:
            continue
        norms = np.linalg.norm(out.precoders.beams(out.analog), axis=0)
        assert np.max(np.abs(norms - 1)) <= 1e-9
        if scheme.startswith("hybrid"):
            assert out.analog.n_tx == 8 and out.analog.n_rf == 3


def test_two_bit_pipeline_runs():
    c = small(resolution_bits=2, n_channel_realizations=2, schemes=("digital_slnr", "hybrid_slnr"))
    table = run_sum_rate_sweep(c)
    assert all(np.isfinite(r.mean_sum_rate) for r in table.rows)


# -- convergence ---------------------------------------------------------------------


def test_trace_shape_and_monotone_best():
    c = cfg.convergence_config(ga=GaConfig(population_size=20, max_generations=40))
    trace = run_convergence_trace(c)
    assert len(trace) == 41
    assert [r.generation for r in trace.records] == list(range(41))
    assert np.all(np.diff(trace.best) >= 0)
    assert np.all(trace.mean <= trace.best + 1e-12)


def test_trace_requires_hybrid_scheme():
    with pytest.raises(ConfigError):
        run_convergence_trace(cfg.convergence_config(schemes=("digital_slnr",)))


def test_trace_requires_single_snr():
    with pytest.raises(ConfigError):
        run_convergence_trace(cfg.convergence_config(snr_grid_db=(0.0, 10.0)))


def test_selection_pressure_raises_mean_fitness():
    improved = 0
    for seed in range(100):
        trace = run_convergence_trace(cfg.convergence_config(seed=seed))
        improved += trace.mean[0] < trace.mean[-1]
    assert improved >= 95


# -- beams ---------------------------------------------------------------------------


def test_beam_pattern_steers_to_nodes():
    c = cfg.beam_config(schemes=("digital_slnr",))
    result = run_beam_pattern(c)
    pat = result.patterns["digital_slnr"]
    peaks = np.rad2deg(pat.angles[np.argmax(pat.gain_per_node, axis=1)])
    assert np.all(np.abs(peaks - np.array(c.los_angles_deg)) <= 5.0)


def test_beam_export_db_column():
    result = run_beam_pattern(cfg.beam_config())
    assert set(result.patterns) == {"digital_slnr", "hybrid_slnr"}
    for pat in result.patterns.values():
        for _, _, lin, db in export.beam_rows(pat):
            if lin > 0:
                assert db == pytest.approx(10 * np.log10(lin), abs=1e-9)


def test_beam_pattern_needs_los():
    with pytest.raises(ConfigError):
        run_beam_pattern(cfg.convergence_config())


# -- oracle ---------------------------------------------------------------------------


def test_oracle_check_small():
    c = cfg.oracle_config(n_channel_realizations=3)
    rows = run_oracle_check(c)
    assert [r.run for r in rows] == [0, 1, 2]
    for r in rows:
        assert r.ga_fitness <= r.oracle_fitness * (1 + 1e-12)


# -- export ---------------------------------------------------------------------------


def test_csv_and_json_share_schema():
    c = small(n_channel_realizations=2, schemes=("digital_slnr",))
    rows = export.sweep_rows(run_sum_rate_sweep(c))
    meta = export.metadata(c, "sweep")
    text = export.to_csv(meta, export.SWEEP_COLUMNS, rows)
    header = [line for line in text.splitlines() if line.startswith("#")]
    assert f"# config_hash: {c.digest()}" in header and "# seed: 0" in header
    body = list(csv.reader(io.StringIO("\n".join(l for l in text.splitlines() if not l.startswith("#")))))
    assert tuple(body[0]) == export.SWEEP_COLUMNS
    assert float(body[1][2]) == rows[0][2]  # repr round-trips exactly
    doc = json.loads(export.to_json(meta, export.SWEEP_COLUMNS, rows))
    assert doc["metadata"] == meta and doc["columns"] == list(export.SWEEP_COLUMNS)
    assert [tuple(r.values()) for r in doc["rows"]] == rows


def test_trace_columns():
    assert export.TRACE_COLUMNS == ("generation", "best_fitness", "mean_fitness")
    assert export.BEAM_COLUMNS == ("angle_deg", "node", "gain_linear", "gain_db")
