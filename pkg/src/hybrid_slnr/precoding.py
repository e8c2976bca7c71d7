"""Quantized analog precoders and closed-form digital precoders (SLNR, ZF).

Digital precoders are always normalized per node so that the aggregate
beam ``A @ D_l`` has unit Euclidean norm. Passing ``analog=None`` means a
fully digital transmitter (``A`` is the identity, ``N_RF = N_T``).

Because the power constraint sits on ``A D`` rather than on ``D``, the SLNR
pencil is solved in analog-whitened coordinates: with ``A = U S V^H`` and
``T = V S^+``, the substitution ``D = T y`` turns ``||A D||`` into ``||y||``
and the noise term into ``M sigma^2 I``. For ``A = I`` this is the plain
textbook pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import EffectiveChannel
from .errors import ContractError, NumericalError, SingularChannelError, UnsupportedConfigurationError

ZF_MAX_CONDITION = 1e12
RANK_RTOL = 1e-10


def phase_table(bits: int) -> np.ndarray:
    """Complex value for each phase index ``v``: ``exp(j 2 pi (v + 1) / 2**bits)``.

    Quarter-turn phases are snapped to exact ``+-1``/``+-j``.
    """
    if bits < 1:
        raise ContractError(f"resolution must be at least one bit, got {bits}")
    phi = 2.0 * np.pi * (np.arange(2**bits) + 1) / 2**bits
    re, im = np.cos(phi), np.sin(phi)
    re[np.abs(re) < 1e-12] = 0.0
    im[np.abs(im) < 1e-12] = 0.0
    return re + 1j * im


@dataclass(frozen=True)
class AnalogPrecoder:
    """``N_T x N_RF`` phase-shifter network with ``resolution_bits``-bit phases."""

    phase_indices: np.ndarray
    resolution_bits: int
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = np.asarray(self.phase_indices)
        if idx.ndim == 1:
            idx = idx[:, np.newaxis]
        if idx.ndim != 2 or idx.size == 0:
            raise ContractError(f"phase indices must be a nonempty 2-D matrix, got shape {idx.shape}")
        if not np.issubdtype(idx.dtype, np.integer):
            if not np.all(np.equal(np.mod(idx, 1), 0)):
                raise ContractError("phase indices must be integers")
            idx = idx.astype(np.int64)
        if idx.min() < 0 or idx.max() >= 2**self.resolution_bits:
            raise ContractError(
                f"phase indices must lie in [0, {2**self.resolution_bits - 1}] for "
                f"{self.resolution_bits}-bit shifters"
            )
        idx = idx.astype(np.int64)
        idx.setflags(write=False)
        object.__setattr__(self, "phase_indices", idx)
        mat = phase_table(self.resolution_bits)[idx]
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __eq__(self, other):
        if not isinstance(other, AnalogPrecoder):
            return NotImplemented
        return self.resolution_bits == other.resolution_bits and np.array_equal(
            self.phase_indices, other.phase_indices
        )

    __hash__ = None

    @property
    def n_tx(self) -> int:
        return self.phase_indices.shape[0]

    @property
    def n_rf(self) -> int:
        return self.phase_indices.shape[1]

    @property
    def phases(self) -> np.ndarray:
        return 2.0 * np.pi * (self.phase_indices + 1) / 2**self.resolution_bits


def analog_from_indices(phase_indices, bits: int) -> AnalogPrecoder:
    return AnalogPrecoder(np.asarray(phase_indices), bits)


def analog_matrix(analog: AnalogPrecoder | None, n_rf: int) -> np.ndarray:
    return np.eye(n_rf, dtype=complex) if analog is None else analog.matrix


@dataclass(frozen=True)
class DigitalPrecoderSet:
    """Per-node digital weights; row ``l`` of ``vectors`` is ``D_l``."""

    vectors: np.ndarray
    noise_power: float
    rx_antennas: tuple[int, ...]

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if v.shape[0] != len(self.rx_antennas):
            raise ContractError(f"{v.shape[0]} precoders for {len(self.rx_antennas)} nodes")
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "rx_antennas", tuple(int(m) for m in self.rx_antennas))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, l: int) -> np.ndarray:
        return self.vectors[l]

    @property
    def n_rf(self) -> int:
        return self.vectors.shape[1]

    def beams(self, analog: AnalogPrecoder | None) -> np.ndarray:
        """Aggregate beams ``A @ D_l`` as columns, ``N_T x K``."""
        return analog_matrix(analog, self.n_rf) @ self.vectors.T


@dataclass(frozen=True)
class SlnrSolution:
    precoders: DigitalPrecoderSet
    lambda_max: np.ndarray
    # node had an all-zero effective channel; its D_l is arbitrary
    degenerate: tuple[bool, ...] = ()


def _check_noise(noise_power: float) -> None:
    if not noise_power > 0:
        raise ContractError(f"noise power must be positive, got {noise_power}")


def gram(x: np.ndarray) -> np.ndarray:
    """``X^H X`` over the last two axes."""
    return np.swapaxes(x.conj(), -1, -2) @ x


def generalized_principal_pair(c: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Largest eigenpair of the Hermitian-definite pencil ``C v = lam B v``.

    Works on stacks ``(..., n, n)``. ``B`` is reduced by its Cholesky factor
    ``L`` and the Hermitian matrix ``L^-1 C L^-H`` is diagonalized; the
    returned ``v`` has unit Euclidean norm.
    """
    try:
        chol = np.linalg.cholesky(b)
        n = b.shape[-1]
        l_inv = np.linalg.solve(chol, np.broadcast_to(np.eye(n, dtype=complex), b.shape))
        m = l_inv @ c @ np.swapaxes(l_inv.conj(), -1, -2)
        m = 0.5 * (m + np.swapaxes(m.conj(), -1, -2))
        w, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        eig_b = np.linalg.eigvalsh(b)
        raise NumericalError(
            f"generalized eigen solve failed ({exc}); smallest eigenvalue of the "
            f"noise-plus-leakage matrix = {eig_b.min():.3e}, largest = {eig_b.max():.3e}"
        ) from exc
    lam = np.maximum(w[..., -1], 0.0)
    v = np.swapaxes(l_inv.conj(), -1, -2) @ vecs[..., -1:]
    v = v[..., 0]
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return lam, v


def analog_whitener(a: np.ndarray | None, n_rf: int | None = None) -> np.ndarray:
    """``T = V S^+`` for a stack of analog matrices ``(..., N_T, N_RF)``.

    Directions in the null space of ``A`` map to zero columns. ``a=None``
    gives the identity of size ``n_rf``.
    """
    if a is None:
        return np.eye(n_rf, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > RANK_RTOL * s[..., :1]
    s_inv = np.divide(1.0, s, out=np.zeros_like(s), where=keep)
    return np.swapaxes(vh.conj(), -1, -2) * s_inv[..., None, :]


def slnr_matrices(
    gram_per_user: Sequence[np.ndarray], noise_power: float, rx_antennas: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Signal and noise-plus-leakage matrices for every node.

    ``gram_per_user[k]`` is ``(H^E_k)^H H^E_k`` with shape ``(..., n, n)``.
    Returns ``C`` and ``B`` with shape ``(..., K, n, n)``.
    """
    grams = np.stack(gram_per_user, axis=-3)
    n = grams.shape[-1]
    total = grams.sum(axis=-3, keepdims=True)
    noise = noise_power * np.asarray(rx_antennas, dtype=float)[:, None, None] * np.eye(n)
    return grams, total - grams + noise


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-modulus entry is real and positive."""
    i = np.argmax(np.abs(v))
    out = v * (abs(v[i]) / v[i])
    out[i] = abs(v[i])
    return out


def _normalized(v: np.ndarray, a: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(a @ v)
    if not norm > 0:
        raise NumericalError("digital precoder lies in the null space of the analog precoder")
    return v / norm


def _validate_effective(effective_channels: Sequence[EffectiveChannel]) -> int:
    if len(effective_channels) < 1:
        raise ContractError("need at least one effective channel")
    n_rf = {h.n_rf for h in effective_channels}
    if len(n_rf) != 1:
        raise ContractError(f"effective channels disagree on N_RF: {sorted(n_rf)}")
    return n_rf.pop()


def slnr_pencil(
    effective_channels: Sequence[EffectiveChannel],
    noise_power: float,
    rx_antennas: Sequence[int] | None = None,
    analog: AnalogPrecoder | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whitened signal/leakage pencil ``(C, B, T)`` for every node.

    ``C[l]`` and ``B[l]`` are ``N_RF x N_RF``; the SLNR of ``D = T y`` is
    ``y^H C y / y^H B y`` whenever ``||A D|| = ||y||``.
    """
    _check_noise(noise_power)
    n_rf = _validate_effective(effective_channels)
    if rx_antennas is None:
        rx_antennas = [h.n_rx for h in effective_channels]
    if len(rx_antennas) != len(effective_channels):
        raise ContractError("rx_antennas must have one entry per node")
    if analog is not None and analog.n_rf != n_rf:
        raise ContractError(f"analog precoder has {analog.n_rf} RF chains, channels have {n_rf}")
    t = analog_whitener(None if analog is None else analog.matrix, n_rf)
    c, b = slnr_matrices([gram(h.entries @ t) for h in effective_channels], noise_power, rx_antennas)
    return c, b, t


def slnr_digital_precoder(
    effective_channels: Sequence[EffectiveChannel],
    noise_power: float,
    rx_antennas: Sequence[int] | None = None,
    analog: AnalogPrecoder | None = None,
) -> SlnrSolution:
    """Per-node SLNR-maximizing digital precoders from effective channels only.

    Node ``l`` gets the principal generalized eigenvector of its signal
    matrix against noise-plus-leakage, scaled so that ``||A D_l|| = 1``.
    The eigenvalue is the SLNR the precoder achieves.
    """
    c, b, t = slnr_pencil(effective_channels, noise_power, rx_antennas, analog)
    n_rf = t.shape[0]
    a = analog_matrix(analog, n_rf)
    lam, y = generalized_principal_pair(c, b)
    vectors, degenerate = [], []
    for l in range(len(effective_channels)):
        if not np.any(c[l]):
            lam[l] = 0.0
            d = t[:, 0].copy()
            degenerate.append(True)
        else:
            d = _fix_phase(t @ y[l])
            degenerate.append(False)
        vectors.append(_normalized(d, a))
    rx = tuple(rx_antennas) if rx_antennas is not None else tuple(h.n_rx for h in effective_channels)
    precoders = DigitalPrecoderSet(np.array(vectors), noise_power, rx)
    return SlnrSolution(precoders, lam, tuple(degenerate))


def zf_digital_precoder(
    effective_channels: Sequence[EffectiveChannel],
    noise_power: float,
    analog: AnalogPrecoder | None = None,
) -> DigitalPrecoderSet:
    """Channel-inversion ZF for single-antenna nodes.

    Column ``l`` of ``G^H (G G^H)^-1`` is rescaled to ``||A D_l|| = 1``.
    """
    _check_noise(noise_power)
    n_rf = _validate_effective(effective_channels)
    if any(h.n_rx != 1 for h in effective_channels):
        raise UnsupportedConfigurationError("ZF precoding is implemented for single-antenna nodes only")
    k = len(effective_channels)
    if k > n_rf:
        raise UnsupportedConfigurationError(f"ZF needs K <= N_RF, got K={k}, N_RF={n_rf}")
    g = np.vstack([h.entries for h in effective_channels])
    ggh = g @ g.conj().T
    cond = np.linalg.cond(ggh)
    if not cond <= ZF_MAX_CONDITION:
        raise SingularChannelError(f"stacked effective channel is rank deficient (cond = {cond:.3e})")
    w = g.conj().T @ np.linalg.inv(ggh)
    a = analog_matrix(analog, n_rf)
    vectors = np.array([_normalized(w[:, l], a) for l in range(k)])
    return DigitalPrecoderSet(vectors, noise_power, (1,) * k)


def zf_beams_batch(g: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ZF over a stack of candidates.

    ``g`` has shape ``(P, K, N_RF)``, ``a`` shape ``(P, N_T, N_RF)``. Returns
    normalized digital precoders ``(P, N_RF, K)`` and a boolean mask of
    candidates whose ``G G^H`` is too ill-conditioned (their precoders are
    zero).
    """
    ggh = g @ np.swapaxes(g.conj(), -1, -2)
    cond = np.linalg.cond(ggh)
    singular = ~(cond <= ZF_MAX_CONDITION)
    eye = np.eye(ggh.shape[-1])
    safe = np.where(singular[:, None, None], eye, ggh)
    w = np.swapaxes(g.conj(), -1, -2) @ np.linalg.inv(safe)
    norms = np.linalg.norm(a @ w, axis=-2, keepdims=True)
    w = np.where(singular[:, None, None], 0.0, w / np.where(norms > 0, norms, 1.0))
    return w, singular
