"""The measurement side of the loop.

:class:`ChannelProbe` is the only object that holds true channels while the
GA runs. Given an analog setting it returns what the central unit would
measure (``H_k A`` for every node) and scores it; the GA sees nothing but
the score.
"""

from __future__ import annotations

import numpy as np

from ..channel import ChannelSet, EffectiveChannel, effective_channel
from ..metrics import fitness_batch, zf_sum_rate_batch
from ..precoding import AnalogPrecoder, phase_table

OBJECTIVES = ("slnr", "zf")


class ChannelProbe:
    """Fitness callback for :func:`hybrid_slnr.ga.evolve`.

    ``objective="slnr"`` scores the low-SNR surrogate sum of
    ``log2(1 + lambda_max)``; ``objective="zf"`` scores the exact sum rate
    achieved by ZF digital precoding on the measured channel.
    """

    def __init__(self, channels: ChannelSet, noise_power: float, bits: int, objective: str = "slnr"):
        if objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        self._channels = channels
        self._h = [u.entries for u in channels]
        self._rx = channels.rx_antennas
        self._table = phase_table(bits)
        self.noise_power = noise_power
        self.bits = bits
        self.objective = objective
        self.n_measurements = 0

    def measure(self, analog: AnalogPrecoder) -> list[EffectiveChannel]:
        self.n_measurements += 1
        return [effective_channel(h, analog) for h in self._channels]

    def evaluate_batch(self, phase_indices: np.ndarray) -> np.ndarray:
        a = self._table[phase_indices]
        self.n_measurements += a.shape[0]
        measured = [h @ a for h in self._h]
        if self.objective == "slnr":
            return fitness_batch(measured, self.noise_power, self._rx, a)
        return zf_sum_rate_batch(np.concatenate(measured, axis=1), a, self.noise_power)

    def __call__(self, analog: AnalogPrecoder) -> float:
        return float(self.evaluate_batch(analog.phase_indices[None])[0])
