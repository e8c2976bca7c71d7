"""True channel realizations and the effective (post-analog) channel.

The optimizer side of the package never sees a :class:`ChannelMatrix`; it
only receives :class:`EffectiveChannel` objects produced by
:func:`effective_channel`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ContractError

if TYPE_CHECKING:
    from .precoding import AnalogPrecoder


def _as_complex_matrix(entries, what: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractError(f"{what} must be a nonempty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{what} has non-finite entries")
    return arr


@dataclass(frozen=True)
class ChannelMatrix:
    """Channel from the transmitter to one remote node, ``n_rx x n_tx``."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_matrix(self.entries, "channel"))

    @property
    def n_rx(self) -> int:
        return self.entries.shape[0]

    @property
    def n_tx(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class ChannelSet:
    users: tuple[ChannelMatrix, ...]

    def __post_init__(self):
        users = tuple(u if isinstance(u, ChannelMatrix) else ChannelMatrix(u) for u in self.users)
        if not users:
            raise ContractError("a channel set needs at least one user")
        n_tx = {u.n_tx for u in users}
        if len(n_tx) != 1:
            raise ContractError(f"users disagree on the number of tx antennas: {sorted(n_tx)}")
        object.__setattr__(self, "users", users)

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    def __getitem__(self, i: int) -> ChannelMatrix:
        return self.users[i]

    @property
    def n_tx(self) -> int:
        return self.users[0].n_tx

    @property
    def rx_antennas(self) -> list[int]:
        return [u.n_rx for u in self.users]


@dataclass(frozen=True)
class EffectiveChannel:
    """The distorted channel ``H A`` as measured behind the analog network."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_matrix(self.entries, "effective channel"))

    @property
    def n_rx(self) -> int:
        return self.entries.shape[0]

    @property
    def n_rf(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class UlaGeometry:
    n_elements: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise ContractError(f"n_elements must be a positive integer, got {self.n_elements}")
        if not self.spacing_wavelengths > 0:
            raise ContractError(f"spacing must be positive, got {self.spacing_wavelengths}")


def draw_iid_rayleigh(n_rx: int, n_tx: int, rng: np.random.Generator) -> ChannelMatrix:
    """Entries are CN(0, 1): real and imaginary parts each have variance 1/2."""
    if n_rx < 1 or n_tx < 1:
        raise ContractError(f"dimensions must be positive, got ({n_rx}, {n_tx})")
    g = rng.standard_normal((2, n_rx, n_tx))
    return ChannelMatrix((g[0] + 1j * g[1]) / np.sqrt(2.0))


def draw_channel_set(rx_antennas: Sequence[int], n_tx: int, rng: np.random.Generator) -> ChannelSet:
    return ChannelSet(tuple(draw_iid_rayleigh(m, n_tx, rng) for m in rx_antennas))


def steering_vector(geometry: UlaGeometry, angle: float) -> np.ndarray:
    """ULA response ``exp(j 2 pi d m sin(angle))`` for ``m = 0 .. n-1``.

    ``angle`` is in radians measured from broadside and must lie in
    ``[-pi/2, pi/2]``.
    """
    if not -np.pi / 2 <= angle <= np.pi / 2:
        raise ValueError(f"angle {angle!r} rad outside [-pi/2, pi/2]")
    m = np.arange(geometry.n_elements)
    return np.exp(2j * np.pi * geometry.spacing_wavelengths * m * np.sin(angle))


def steering_matrix(geometry: UlaGeometry, angles: np.ndarray) -> np.ndarray:
    """Steering vectors for a whole angle grid, one per row."""
    angles = np.asarray(angles, dtype=float)
    if np.any(np.abs(angles) > np.pi / 2):
        raise ValueError("angles outside [-pi/2, pi/2]")
    m = np.arange(geometry.n_elements)
    return np.exp(2j * np.pi * geometry.spacing_wavelengths * np.outer(np.sin(angles), m))


def los_channel(geometry: UlaGeometry, angle: float) -> ChannelMatrix:
    return ChannelMatrix(steering_vector(geometry, angle).conj()[np.newaxis, :])


def effective_channel(h: ChannelMatrix, a: AnalogPrecoder | None) -> EffectiveChannel:
    """Return ``H A``; ``a=None`` is the fully digital pass-through ``A = I``."""
    if a is None:
        return EffectiveChannel(h.entries)
    if h.n_tx != a.n_tx:
        raise ContractError(f"channel has {h.n_tx} tx antennas but analog precoder has {a.n_tx} rows")
    return EffectiveChannel(h.entries @ a.matrix)
