"""Monte Carlo sum-rate sweeps, GA convergence traces, beam patterns, oracle check."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .. import streams
from ..channel import ChannelSet, draw_channel_set, effective_channel, los_channel
from ..errors import ConfigError, SingularChannelError
from ..ga import GaTrace, evolve, exhaustive_oracle
from ..metrics import BeamPattern, beam_pattern, sinr, sum_rate
from ..precoding import AnalogPrecoder, DigitalPrecoderSet, slnr_digital_precoder, zf_digital_precoder
from .config import SCHEMES, ChannelModel, ExperimentConfig
from .probe import ChannelProbe

log = logging.getLogger(__name__)

ORACLE_RTOL = 1e-9


def noise_power(snr_db: float) -> float:
    """Per-stream SNR is ``1 / sigma^2`` with unit-norm beams and CN(0, 1) channels."""
    return 10.0 ** (-snr_db / 10.0)


def draw_channels(config: ExperimentConfig, realization: int) -> ChannelSet:
    if config.channel_model is ChannelModel.LOS_ULA:
        return ChannelSet(tuple(los_channel(config.array, np.deg2rad(a)) for a in config.los_angles_deg))
    rng = streams.make_stream(config.seed, streams.CHANNEL, realization)
    return draw_channel_set(config.rx_antennas, config.n_tx, rng)


@dataclass(frozen=True)
class SchemeOutcome:
    analog: AnalogPrecoder | None
    precoders: DigitalPrecoderSet | None
    sum_rate: float
    trace: GaTrace | None = None


def run_scheme(
    scheme: str,
    channels: ChannelSet,
    config: ExperimentConfig,
    sigma2: float,
    ga_rng: np.random.Generator | None = None,
) -> SchemeOutcome:
    """Design precoders for one scheme and score them on the true channels."""
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    analog, trace = None, None
    if scheme.startswith("hybrid"):
        objective = "slnr" if scheme == "hybrid_slnr" else "zf"
        probe = ChannelProbe(channels, sigma2, config.resolution_bits, objective)
        result = evolve(probe, config.ga, (config.n_tx, config.n_rf, config.n_users), ga_rng)
        analog, trace = result.best, result.trace
        measured = probe.measure(analog)
    else:
        measured = [effective_channel(h, None) for h in channels]

    if scheme.endswith("slnr"):
        digitals = slnr_digital_precoder(measured, sigma2, config.rx_antennas, analog).precoders
    else:
        try:
            digitals = zf_digital_precoder(measured, sigma2, analog)
        except SingularChannelError:
            if analog is None:
                raise
            # every candidate the GA saw was rank deficient
            log.warning("hybrid ZF: best analog setting leaves a singular effective channel")
            return SchemeOutcome(analog, None, 0.0, trace)
    rate = sum_rate(sinr(channels, analog, digitals, sigma2))
    return SchemeOutcome(analog, digitals, rate, trace)


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    snr_db: float
    mean_sum_rate: float
    std_err: float
    n_realizations: int


@dataclass
class ResultTable:
    rows: list[SweepRow]
    # per-realization sum rates keyed by (scheme, snr_db), realization order
    samples: dict[tuple[str, float], np.ndarray] = field(default_factory=dict)

    def row(self, scheme: str, snr_db: float) -> SweepRow:
        for r in self.rows:
            if r.scheme == scheme and r.snr_db == snr_db:
                return r
        raise KeyError((scheme, snr_db))


def _sweep_realization(config: ExperimentConfig, realization: int) -> np.ndarray:
    """Sum rates for one channel draw, shape ``(len(schemes), len(snr_grid))``."""
    channels = draw_channels(config, realization)
    out = np.empty((len(config.schemes), len(config.snr_grid_db)))
    for j, snr_db in enumerate(config.snr_grid_db):
        sigma2 = noise_power(snr_db)
        for i, scheme in enumerate(config.schemes):
            ga_rng = None
            if scheme.startswith("hybrid"):
                ga_rng = streams.make_stream(config.seed, streams.GA, realization, j, SCHEMES.index(scheme))
            out[i, j] = run_scheme(scheme, channels, config, sigma2, ga_rng).sum_rate
    return out


def _map_realizations(fn, n: int, workers: int) -> list:
    if workers <= 1:
        return [fn(r) for r in range(n)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n), chunksize=max(1, n // (4 * workers))))


def run_sum_rate_sweep(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    """Mean true sum rate per (scheme, SNR) over seeded channel realizations.

    The same channel draw is shared by every scheme and SNR point of a
    realization; each hybrid GA run gets its own sub-stream, so results do
    not depend on ``workers``.
    """
    n = config.n_channel_realizations
    per_real = np.stack(_map_realizations(partial(_sweep_realization, config), n, workers))
    rows, samples = [], {}
    for i, scheme in enumerate(config.schemes):
        for j, snr_db in enumerate(config.snr_grid_db):
            x = per_real[:, i, j]
            se = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
            rows.append(SweepRow(scheme, snr_db, float(np.mean(x)), se, n))
            samples[(scheme, snr_db)] = x
    rows.sort(key=lambda r: (r.scheme, r.snr_db))
    return ResultTable(rows, samples)


def _single_snr(config: ExperimentConfig, snr_db: float | None) -> float:
    if snr_db is not None:
        return float(snr_db)
    if len(config.snr_grid_db) != 1:
        raise ConfigError("this experiment needs a single SNR point (set snr_grid_db to one value or pass snr_db)")
    return config.snr_grid_db[0]


def run_convergence_trace(
    config: ExperimentConfig, snr_db: float | None = None, realization: int = 0
) -> GaTrace:
    """Best and mean population fitness per generation on one fixed channel draw."""
    hybrids = config.hybrid_schemes
    if not hybrids:
        raise ConfigError("convergence trace needs a hybrid scheme in `schemes`")
    scheme = hybrids[0]
    snr = _single_snr(config, snr_db)
    channels = draw_channels(config, realization)
    ga_rng = streams.make_stream(config.seed, streams.GA, realization, 0, SCHEMES.index(scheme))
    return run_scheme(scheme, channels, config, noise_power(snr), ga_rng).trace


@dataclass
class BeamResult:
    patterns: dict[str, BeamPattern]
    node_angles_deg: tuple[float, ...]
    # strongest gain outside each node's own main lobe, per scheme
    sidelobes: dict[str, np.ndarray]


def main_lobe_mask(angles: np.ndarray, steer_deg: float, n_elements: int, spacing: float) -> np.ndarray:
    """Angles between the first nulls around ``steer_deg``."""
    half_width = 1.0 / (n_elements * spacing)
    return np.abs(np.sin(angles) - np.sin(np.deg2rad(steer_deg))) < half_width


def run_beam_pattern(config: ExperimentConfig, snr_db: float | None = None, angle_grid=None) -> BeamResult:
    if config.channel_model is not ChannelModel.LOS_ULA:
        raise ConfigError("beam patterns need channel_model los_ula with los_angles_deg")
    snr = _single_snr(config, snr_db)
    channels = draw_channels(config, 0)
    patterns, sidelobes = {}, {}
    for scheme in config.schemes:
        ga_rng = None
        if scheme.startswith("hybrid"):
            ga_rng = streams.make_stream(config.seed, streams.GA, 0, 0, SCHEMES.index(scheme))
        outcome = run_scheme(scheme, channels, config, noise_power(snr), ga_rng)
        if outcome.precoders is None:
            continue
        pat = beam_pattern(config.array, outcome.analog, outcome.precoders, angle_grid)
        patterns[scheme] = pat
        sidelobes[scheme] = np.array(
            [
                np.max(
                    pat.gain_per_node[l][
                        ~main_lobe_mask(pat.angles, a, config.n_tx, config.array.spacing_wavelengths)
                    ],
                    initial=0.0,
                )
                for l, a in enumerate(config.los_angles_deg)
            ]
        )
    if "digital_slnr" in sidelobes and "hybrid_slnr" in sidelobes:
        d, h = sidelobes["digital_slnr"].max(), sidelobes["hybrid_slnr"].max()
        log.info("strongest sidelobe: digital %.3f, hybrid %.3f (linear)", d, h)
    return BeamResult(patterns, config.los_angles_deg, sidelobes)


@dataclass(frozen=True)
class OracleRow:
    run: int
    ga_fitness: float
    oracle_fitness: float
    hit: bool


def _oracle_run(config: ExperimentConfig, sigma2: float, run: int) -> OracleRow:
    channels = draw_channels(config, run)
    probe = ChannelProbe(channels, sigma2, config.resolution_bits, "slnr")
    ga_rng = streams.make_stream(config.seed, streams.GA, run, 0, SCHEMES.index("hybrid_slnr"))
    result = evolve(probe, config.ga, (config.n_tx, config.n_rf, config.n_users), ga_rng)
    _, best = exhaustive_oracle(probe, (config.n_tx, config.n_rf), config.resolution_bits)
    hit = result.best_fitness >= best - ORACLE_RTOL * max(1.0, abs(best))
    return OracleRow(run, result.best_fitness, best, bool(hit))


def run_oracle_check(config: ExperimentConfig, snr_db: float | None = None, workers: int = 1) -> list[OracleRow]:
    """GA best vs exhaustive maximum on ``n_channel_realizations`` seeded instances."""
    sigma2 = noise_power(_single_snr(config, snr_db))
    return _map_realizations(partial(_oracle_run, config, sigma2), config.n_channel_realizations, workers)
