"""Seeded sampling of Rayleigh channel matrices.

Random numbers come from Philox4x32-10, a counter-based generator: every
block of four 32-bit words is a pure function of (key, counter), so any trial
can be drawn independently of all others and a whole batch of trials is
generated in one vectorized pass.

Layout of one draw:

* key      = (seed & 0xFFFFFFFF, seed >> 32)
* counter  = (entry index, 0, stream_id & 0xFFFFFFFF, stream_id >> 32)

Each complex entry consumes one block. Words (w0, w1) give a 53-bit uniform
u1 in (0, 1], words (w2, w3) a 53-bit uniform u2 in [0, 1), and the entry is
``sqrt(-ln u1) * exp(2j*pi*u2)`` (polar Box-Muller), i.e. circularly-symmetric
CN(0, 1) with variance 1/2 in each of the real and imaginary parts. Matrices
are filled row-major; within a stream entries are numbered consecutively, so a
channel pair uses entries 0 .. K*M-1 for Q1 and the following N*K for Q2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_PHILOX_W0 = np.uint64(0x9E3779B9)
_PHILOX_W1 = np.uint64(0xBB67AE85)
_PHILOX_ROUNDS = 10
_TWO_POW_M53 = 2.0**-53

# trials per vectorized chunk; bounds memory in batch samplers
CHUNK_TRIALS = 8192


def philox4x32(counter, key) -> tuple[np.ndarray, ...]:
    """Philox4x32-10 block function.

    ``counter`` is a sequence of four broadcastable arrays of 32-bit values,
    ``key`` a pair of 32-bit integers. Returns four uint64 arrays holding the
    32-bit output words.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in counter)
    k0 = np.uint64(int(key[0]) & 0xFFFFFFFF)
    k1 = np.uint64(int(key[1]) & 0xFFFFFFFF)
    for r in range(_PHILOX_ROUNDS):
        if r:
            k0 = (k0 + _PHILOX_W0) & _MASK32
            k1 = (k1 + _PHILOX_W1) & _MASK32
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        c0, c1, c2, c3 = (p1 >> _SHIFT32) ^ c1 ^ k0, p1 & _MASK32, (p0 >> _SHIFT32) ^ c3 ^ k1, p0 & _MASK32
    return c0, c1, c2, c3


def _split64(value) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(value, dtype=np.uint64)
    return v & _MASK32, v >> _SHIFT32


def complex_normals(seed: int, stream_ids, start: int, count: int) -> np.ndarray:
    """CN(0, 1) draws for entries ``start .. start+count-1`` of each stream.

    Returns an array of shape ``(len(stream_ids), count)``.
    """
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    sid = np.atleast_1d(np.asarray(stream_ids, dtype=np.uint64))[:, None]
    s_lo, s_hi = _split64(sid)
    idx = np.arange(start, start + count, dtype=np.uint64)[None, :]
    w0, w1, w2, w3 = philox4x32((idx, np.uint64(0), s_lo, s_hi), (seed & 0xFFFFFFFF, seed >> 32))
    u1 = ((w0 >> np.uint64(5)) * np.uint64(1 << 26) + (w1 >> np.uint64(6)) + np.uint64(1)).astype(float) * _TWO_POW_M53
    u2 = ((w2 >> np.uint64(5)) * np.uint64(1 << 26) + (w3 >> np.uint64(6))).astype(float) * _TWO_POW_M53
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts: M at the users, K at the UAV relay(s), N at the BTS."""

    M: int
    K: int
    N: int

    def __post_init__(self):
        for name in ("M", "K", "N"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"antenna count {name} must be a positive integer, got {v}")

    @property
    def ordered(self) -> tuple[int, int, int]:
        return tuple(sorted((self.M, self.K, self.N)))

    @property
    def L1(self) -> int:
        return self.ordered[0]

    @property
    def L2(self) -> int:
        return self.ordered[1]

    @property
    def L3(self) -> int:
        return self.ordered[2]


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64 or not 0 <= self.stream_id < 2**64:
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")


@dataclass(frozen=True)
class ChannelPair:
    """User->UAV channel Q1 (K x M) and UAV->BTS channel Q2 (N x K).

    Both arrays may carry leading batch dimensions.
    """

    Q1: np.ndarray
    Q2: np.ndarray

    def __post_init__(self):
        if self.Q1.shape[-2] != self.Q2.shape[-1]:
            raise ValueError(f"inner dimensions differ: Q1 {self.Q1.shape}, Q2 {self.Q2.shape}")

    @property
    def Q(self) -> np.ndarray:
        return self.Q2 @ self.Q1


def sample_gaussian_matrix(rows: int, cols: int, stream: RandomStream, offset: int = 0) -> np.ndarray:
    """A rows x cols matrix of i.i.d. CN(0, 1) entries, starting at entry ``offset``."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    z = complex_normals(stream.seed, stream.stream_id, offset, rows * cols)
    return z.reshape(rows, cols)


def sample_channel_pair(config: AntennaConfig, stream: RandomStream) -> ChannelPair:
    M, K, N = config.M, config.K, config.N
    Q1 = sample_gaussian_matrix(K, M, stream)
    Q2 = sample_gaussian_matrix(N, K, stream, offset=K * M)
    return ChannelPair(Q1, Q2)


def sample_direct_batch(M: int, N: int, seed: int, stream_ids) -> np.ndarray:
    """Stacked N x M direct channels H, one per stream id."""
    sid = np.atleast_1d(stream_ids)
    return complex_normals(seed, sid, 0, N * M).reshape(len(sid), N, M)


def sample_pair_batch(config: AntennaConfig, seed: int, stream_ids) -> ChannelPair:
    """Stacked channel pairs; entry ``t`` equals ``sample_channel_pair`` on stream ``stream_ids[t]``."""
    M, K, N = config.M, config.K, config.N
    sid = np.atleast_1d(stream_ids)
    z = complex_normals(seed, sid, 0, K * M + N * K)
    return ChannelPair(z[:, : K * M].reshape(len(sid), K, M), z[:, K * M :].reshape(len(sid), N, K))


def gram_pair(pair: ChannelPair) -> tuple[np.ndarray, np.ndarray]:
    """Return (Sigma1, Sigma2) = (Q1 Q1^H, Q2^H Q2), both K x K."""
    Q1, Q2 = pair.Q1, pair.Q2
    return Q1 @ _herm(Q1), _herm(Q2) @ Q2


def _herm(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))
