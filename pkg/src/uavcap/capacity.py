"""Per-realization capacity kernels and the Monte Carlo ergodic estimator.

All capacities are in nats. Kernels accept stacked matrices with leading batch
dimensions and return one value per realization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    CHUNK_TRIALS,
    AntennaConfig,
    ChannelPair,
    _herm,
    gram_pair,
    sample_direct_batch,
    sample_pair_batch,
)
from .errors import NotPositiveDefiniteError

MODELS = ("direct", "product")


@dataclass(frozen=True)
class MonteCarloSettings:
    """Trial count and seed. Trial t draws from stream ``stream_offset + t``."""

    trials: int
    seed: int = 0
    stream_offset: int = 0

    def __post_init__(self):
        if self.trials < 2:
            raise ValueError(f"need at least 2 trials for a standard error, got {self.trials}")

    def stream_chunks(self):
        for start in range(0, self.trials, CHUNK_TRIALS):
            stop = min(start + CHUNK_TRIALS, self.trials)
            yield np.arange(self.stream_offset + start, self.stream_offset + stop, dtype=np.uint64)


@dataclass(frozen=True)
class ErgodicEstimate:
    mean_nats: float
    stderr_nats: float
    trials: int
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> "ErgodicEstimate":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        return cls(float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(n)), n, seed)


def logdet_hpd(A: np.ndarray) -> np.ndarray | float:
    """ln det of Hermitian positive definite matrices via Cholesky."""
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("matrix is not Hermitian positive definite") from exc
    d = np.diagonal(L, axis1=-2, axis2=-1).real
    out = 2.0 * np.log(d).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _eye_plus(A: np.ndarray, scale: float) -> np.ndarray:
    n = A.shape[-1]
    return np.eye(n) + scale * A


def _small_gram(X: np.ndarray) -> np.ndarray:
    # X^H X or X X^H, whichever is smaller; both share the nonzero spectrum
    rows, cols = X.shape[-2:]
    return _herm(X) @ X if cols <= rows else X @ _herm(X)


def direct_capacity(H: np.ndarray, p: float):
    """ln det(I_M + p H^H H) for H of shape (..., N, M)."""
    if p <= 0:
        raise ValueError(f"transmit power must be positive, got {p}")
    return logdet_hpd(_eye_plus(_small_gram(H), p))


def _product_hermitian(pair: ChannelPair) -> np.ndarray:
    """A Hermitian matrix with the same nonzero eigenvalues as Q^H Q.

    With K < min(M, N) this is L^H Sigma2 L where Sigma1 = L L^H, using
    det(I + q Q^H Q) = det(I + q Sigma1 Sigma2). Otherwise the smaller Gram
    matrix of Q = Q2 Q1 is formed directly.
    """
    K, M = pair.Q1.shape[-2:]
    N = pair.Q2.shape[-2]
    if K < min(M, N):
        sigma1, sigma2 = gram_pair(pair)
        try:
            L = np.linalg.cholesky(sigma1)
        except np.linalg.LinAlgError:
            # rank-deficient Q1 (probability zero for Gaussian draws)
            return _small_gram(pair.Q)
        return _herm(L) @ sigma2 @ L
    return _small_gram(pair.Q)


def product_capacity(pair: ChannelPair, q: float):
    """ln det(I + q Q^H Q) with Q = Q2 Q1 (relay delay taken as zero)."""
    if q <= 0:
        raise ValueError(f"relay transmit power must be positive, got {q}")
    return logdet_hpd(_eye_plus(_product_hermitian(pair), q))


def _check_power(power: float) -> None:
    if not power > 0:
        raise ValueError(f"power must be positive, got {power}")


def capacity_samples(model: str, config: AntennaConfig, power: float, mc: MonteCarloSettings) -> np.ndarray:
    """Per-trial capacities (nats), in trial order."""
    _check_power(power)
    out = []
    for sid in mc.stream_chunks():
        if model == "direct":
            out.append(direct_capacity(sample_direct_batch(config.M, config.N, mc.seed, sid), power))
        elif model == "product":
            out.append(product_capacity(sample_pair_batch(config, mc.seed, sid), power))
        else:
            raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    return np.concatenate(out)


def ergodic_estimate(model: str, config: AntennaConfig, power: float, mc: MonteCarloSettings) -> ErgodicEstimate:
    """Monte Carlo ergodic capacity of the direct or the product channel."""
    return ErgodicEstimate.from_samples(capacity_samples(model, config, power, mc), mc.seed)


def mode_gains(model: str, config: AntennaConfig, mc: MonteCarloSettings) -> np.ndarray:
    """Nonzero-spectrum eigenvalues per trial, shape (trials, rank).

    The capacity at power x is ``log1p(x * gains).sum(axis=1)``, which lets
    callers re-evaluate one fixed set of draws at many powers (common random
    numbers).
    """
    out = []
    for sid in mc.stream_chunks():
        if model == "direct":
            A = _small_gram(sample_direct_batch(config.M, config.N, mc.seed, sid))
        elif model == "product":
            A = _product_hermitian(sample_pair_batch(config, mc.seed, sid))
        else:
            raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
        out.append(np.clip(np.linalg.eigvalsh(A), 0.0, None))
    return np.concatenate(out)


def logdet_samples(config: AntennaConfig, mc: MonteCarloSettings) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (ln det Sigma1, ln det Sigma2); needs K <= M and K <= N."""
    if config.K > min(config.M, config.N):
        raise ValueError("Sigma1 and Sigma2 are singular unless K <= min(M, N)")
    s1, s2 = [], []
    for sid in mc.stream_chunks():
        sigma1, sigma2 = gram_pair(sample_pair_batch(config, mc.seed, sid))
        s1.append(logdet_hpd(sigma1))
        s2.append(logdet_hpd(sigma2))
    return np.concatenate(s1), np.concatenate(s2)
