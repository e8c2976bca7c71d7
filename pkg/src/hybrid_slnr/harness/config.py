"""Experiment configuration: validation, JSON round-trip, and the stock setups."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from ..channel import UlaGeometry
from ..errors import ConfigError, ContractError
from ..ga import GaConfig

SCHEMES = ("digital_slnr", "hybrid_slnr", "digital_zf", "hybrid_zf")
GA_KEYS = ("population_size", "max_generations", "crossover_prob", "mutation_prob", "elitism_count")


class ChannelModel(str, Enum):
    IID_RAYLEIGH = "iid_rayleigh"
    LOS_ULA = "los_ula"


@dataclass(frozen=True)
class ExperimentConfig:
    n_tx: int = 8
    n_rf: int = 3
    n_users: int = 3
    rx_antennas: tuple[int, ...] | None = None
    resolution_bits: int = 1
    snr_grid_db: tuple[float, ...] = tuple(float(s) for s in range(-12, 13, 3))
    n_channel_realizations: int = 500
    ga: GaConfig = field(default_factory=GaConfig)
    channel_model: ChannelModel = ChannelModel.IID_RAYLEIGH
    los_angles_deg: tuple[float, ...] | None = None
    array: UlaGeometry | None = None
    schemes: tuple[str, ...] = SCHEMES
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            set_("channel_model", ChannelModel(self.channel_model))
        except ValueError:
            raise ConfigError(f"unknown channel_model {self.channel_model!r}") from None
        for name in ("n_tx", "n_rf", "n_users", "n_channel_realizations", "resolution_bits"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.n_rf < self.n_users:
            raise ConfigError(f"need n_rf >= n_users, got n_rf={self.n_rf}, n_users={self.n_users}")
        if self.n_rf > self.n_tx:
            raise ConfigError(f"need n_rf <= n_tx, got n_rf={self.n_rf}, n_tx={self.n_tx}")

        rx = (1,) * self.n_users if self.rx_antennas is None else tuple(self.rx_antennas)
        if len(rx) != self.n_users or any(not isinstance(m, int) or m < 1 for m in rx):
            raise ConfigError(f"rx_antennas must list {self.n_users} positive integers, got {rx}")
        set_("rx_antennas", rx)

        snr = tuple(float(s) for s in self.snr_grid_db)
        if not snr:
            raise ConfigError("snr_grid_db is empty")
        set_("snr_grid_db", snr)

        schemes = tuple(self.schemes)
        bad = [s for s in schemes if s not in SCHEMES]
        if bad or not schemes or len(set(schemes)) != len(schemes):
            raise ConfigError(f"schemes must be a nonempty subset of {SCHEMES}, got {schemes}")
        set_("schemes", schemes)
        if any(s.endswith("_zf") for s in schemes) and any(m != 1 for m in rx):
            raise ConfigError("ZF schemes require single-antenna nodes (rx_antennas all 1)")

        try:
            ga = self.ga if isinstance(self.ga, GaConfig) else GaConfig(**self.ga)
            set_("ga", dataclasses.replace(ga, resolution_bits=self.resolution_bits, seed=self.seed))
            array = self.array
            if array is None:
                array = UlaGeometry(self.n_tx)
            elif not isinstance(array, UlaGeometry):
                array = UlaGeometry(**array)
        except (ContractError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        if array.n_elements != self.n_tx:
            raise ConfigError(f"array has {array.n_elements} elements but n_tx={self.n_tx}")
        set_("array", array)

        if self.los_angles_deg is not None:
            angles = tuple(float(a) for a in self.los_angles_deg)
            if len(angles) != self.n_users or any(abs(a) > 90 for a in angles):
                raise ConfigError(f"los_angles_deg must list {self.n_users} angles in [-90, 90]")
            set_("los_angles_deg", angles)
        if self.channel_model is ChannelModel.LOS_ULA:
            if self.los_angles_deg is None:
                raise ConfigError("channel_model los_ula requires los_angles_deg")
            if any(m != 1 for m in rx):
                raise ConfigError("los_ula channels are single-antenna (rx_antennas all 1)")

    @property
    def hybrid_schemes(self) -> tuple[str, ...]:
        return tuple(s for s in self.schemes if s.startswith("hybrid"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_tx": self.n_tx,
            "n_rf": self.n_rf,
            "n_users": self.n_users,
            "rx_antennas": list(self.rx_antennas),
            "resolution_bits": self.resolution_bits,
            "snr_grid_db": list(self.snr_grid_db),
            "n_channel_realizations": self.n_channel_realizations,
            "ga": {k: getattr(self.ga, k) for k in GA_KEYS},
            "channel_model": self.channel_model.value,
            "los_angles_deg": None if self.los_angles_deg is None else list(self.los_angles_deg),
            "array": dataclasses.asdict(self.array),
            "schemes": list(self.schemes),
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        d = dict(d)
        ga = d.get("ga", {})
        if isinstance(ga, dict):
            bad = sorted(set(ga) - set(GA_KEYS))
            if bad:
                raise ConfigError(f"unknown ga keys: {', '.join(bad)}")
        array = d.get("array")
        if isinstance(array, dict) and not set(array) <= {"n_elements", "spacing_wavelengths"}:
            raise ConfigError(f"unknown array keys: {sorted(set(array) - {'n_elements', 'spacing_wavelengths'})}")
        for k in ("rx_antennas", "snr_grid_db", "los_angles_deg", "schemes"):
            if d.get(k) is not None:
                d[k] = tuple(d[k])
        return cls(**d)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")


# Stock setups. N_RF, the realization count, SNR points and LoS angles
# are our choices.


def sum_rate_config(**overrides) -> ExperimentConfig:
    return ExperimentConfig(**overrides)


def convergence_config(**overrides) -> ExperimentConfig:
    base = dict(snr_grid_db=(10.0,), n_channel_realizations=1, schemes=("hybrid_slnr",))
    return ExperimentConfig(**{**base, **overrides})


def beam_config(**overrides) -> ExperimentConfig:
    base = dict(
        channel_model=ChannelModel.LOS_ULA,
        los_angles_deg=(-40.0, 0.0, 40.0),
        snr_grid_db=(10.0,),
        n_channel_realizations=1,
        schemes=("digital_slnr", "hybrid_slnr"),
    )
    return ExperimentConfig(**{**base, **overrides})


def oracle_config(**overrides) -> ExperimentConfig:
    base = dict(
        n_tx=4,
        n_rf=2,
        n_users=2,
        snr_grid_db=(10.0,),
        n_channel_realizations=50,
        ga=GaConfig(population_size=50, max_generations=100),
        schemes=("hybrid_slnr",),
    )
    return ExperimentConfig(**{**base, **overrides})
