"""Link metrics, the GA fitness function, and beam patterns.

All quantities are linear; dB conversion happens at export time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelSet, EffectiveChannel, UlaGeometry, steering_matrix
from .errors import ContractError
from .precoding import (
    AnalogPrecoder,
    DigitalPrecoderSet,
    analog_matrix,
    analog_whitener,
    generalized_principal_pair,
    gram,
    slnr_matrices,
    zf_beams_batch,
)

DEFAULT_BEAM_GRID_POINTS = 721


@dataclass(frozen=True)
class LinkMetrics:
    sinr_per_node: np.ndarray
    sum_rate: float
    slnr_per_node: np.ndarray


@dataclass(frozen=True)
class BeamPattern:
    angles: np.ndarray
    # shape (K, len(angles)), |a(theta)^H A D_l|^2
    gain_per_node: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.angles) <= 0):
            raise ContractError("beam-pattern angle grid must be strictly increasing")


def _check_dims(true_channels: ChannelSet, a: np.ndarray, n_rf: int) -> None:
    if true_channels.n_tx != a.shape[0]:
        raise ContractError(f"channels have {true_channels.n_tx} tx antennas, analog precoder {a.shape[0]} rows")
    if a.shape[1] != n_rf:
        raise ContractError(f"analog precoder has {a.shape[1]} RF chains, digital precoders {n_rf}")


def _received_powers(true_channels: ChannelSet, beams: np.ndarray) -> np.ndarray:
    """``P[l, k] = ||H_l b_k||^2`` for aggregate beams ``b_k`` (columns)."""
    return np.array([np.sum(np.abs(h.entries @ beams) ** 2, axis=0) for h in true_channels])


def sinr(
    true_channels: ChannelSet,
    analog: AnalogPrecoder | None,
    digitals: DigitalPrecoderSet,
    noise_power: float,
) -> np.ndarray:
    if not noise_power > 0:
        raise ContractError(f"noise power must be positive, got {noise_power}")
    if len(digitals) != len(true_channels):
        raise ContractError(f"{len(digitals)} precoders for {len(true_channels)} nodes")
    a = analog_matrix(analog, digitals.n_rf)
    _check_dims(true_channels, a, digitals.n_rf)
    p = _received_powers(true_channels, a @ digitals.vectors.T)
    signal = np.diag(p)
    interference = p.sum(axis=1) - signal
    m = np.asarray(true_channels.rx_antennas, dtype=float)
    return signal / (m * noise_power + interference)


def sum_rate(sinrs) -> float:
    s = np.asarray(sinrs, dtype=float)
    if np.any(s < 0) or np.any(np.isnan(s)):
        raise ContractError("SINR values must be nonnegative")
    return float(np.sum(np.log2(1.0 + s)))


def slnr(
    true_channels: ChannelSet,
    analog: AnalogPrecoder | None,
    digital: np.ndarray,
    node: int,
    noise_power: float,
) -> float:
    """Signal over noise plus the power node ``node``'s beam leaks to the others."""
    if not noise_power > 0:
        raise ContractError(f"noise power must be positive, got {noise_power}")
    d = np.asarray(digital, dtype=complex)
    a = analog_matrix(analog, d.shape[0])
    _check_dims(true_channels, a, d.shape[0])
    p = _received_powers(true_channels, (a @ d)[:, None])[:, 0]
    leakage = p.sum() - p[node]
    return float(p[node] / (true_channels.rx_antennas[node] * noise_power + leakage))


def link_metrics(
    true_channels: ChannelSet,
    analog: AnalogPrecoder | None,
    digitals: DigitalPrecoderSet,
    noise_power: float,
) -> LinkMetrics:
    s = sinr(true_channels, analog, digitals, noise_power)
    leak = np.array(
        [slnr(true_channels, analog, digitals[l], l, noise_power) for l in range(len(digitals))]
    )
    return LinkMetrics(s, sum_rate(s), leak)


def fitness(
    effective_channels: Sequence[EffectiveChannel],
    noise_power: float,
    rx_antennas: Sequence[int] | None = None,
    analog: AnalogPrecoder | None = None,
) -> float:
    """Low-SNR sum-rate surrogate ``sum_k log2(1 + lambda_max^(k))``.

    Inputs are what the central unit can know: the measured effective
    channels and its own analog setting. The true channel is not an input.
    """
    if not noise_power > 0:
        raise ContractError(f"noise power must be positive, got {noise_power}")
    if rx_antennas is None:
        rx_antennas = [h.n_rx for h in effective_channels]
    a = None if analog is None else analog.matrix[None]
    return float(
        fitness_batch([h.entries[None] for h in effective_channels], noise_power, rx_antennas, a)[0]
    )


def fitness_batch(
    effective: Sequence[np.ndarray],
    noise_power: float,
    rx_antennas: Sequence[int],
    analog: np.ndarray | None = None,
) -> np.ndarray:
    """:func:`fitness` for a stack of candidates.

    ``effective[k]`` has shape ``(P, M_k, N_RF)`` and ``analog`` (if given)
    ``(P, N_T, N_RF)``; returns shape ``(P,)``.
    """
    if analog is not None:
        t = analog_whitener(analog)
        effective = [h @ t for h in effective]
    c, b = slnr_matrices([gram(h) for h in effective], noise_power, rx_antennas)
    lam, _ = generalized_principal_pair(c, b)
    return np.log2(1.0 + lam).sum(axis=-1)


def zf_sum_rate_batch(effective: np.ndarray, analog: np.ndarray, noise_power: float) -> np.ndarray:
    """Exact sum rate under ZF digital precoding, from effective channels only.

    ``effective`` is ``(P, K, N_RF)`` (single-antenna nodes stacked as rows),
    ``analog`` is ``(P, N_T, N_RF)``. Rank-deficient candidates score 0.
    """
    w, singular = zf_beams_batch(effective, analog)
    p = np.abs(effective @ w) ** 2
    signal = np.diagonal(p, axis1=-2, axis2=-1)
    interference = p.sum(axis=-1) - signal
    rate = np.log2(1.0 + signal / (noise_power + interference)).sum(axis=-1)
    return np.where(singular, 0.0, rate)


def beam_pattern(
    geometry: UlaGeometry,
    analog: AnalogPrecoder | None,
    digitals: DigitalPrecoderSet,
    angle_grid=None,
) -> BeamPattern:
    """Transmit power gain ``|a(theta)^H A D_l|^2`` for every node over an angle grid."""
    if angle_grid is None:
        angle_grid = np.linspace(-np.pi / 2, np.pi / 2, DEFAULT_BEAM_GRID_POINTS)
    angles = np.asarray(angle_grid, dtype=float)
    if angles.size == 0:
        raise ContractError("angle grid is empty")
    beams = digitals.beams(analog)
    if beams.shape[0] != geometry.n_elements:
        raise ContractError(f"array has {geometry.n_elements} elements, precoder drives {beams.shape[0]}")
    response = steering_matrix(geometry, angles).conj() @ beams
    return BeamPattern(angles, (np.abs(response) ** 2).T)
