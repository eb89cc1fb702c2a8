"""Linear precoding at the relay, marginal eigenvalue densities and the
double-integral lower bound."""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .capacity import ErgodicEstimate, MonteCarloSettings
from .channels import AntennaConfig, ChannelPair, _herm, gram_pair, sample_pair_batch
from .special import QuadratureRule, gauss_laguerre_rule, laguerre_assoc

ALLOCATION_RULES = ("water_filling", "equal")
DEFAULT_ORDER = 96


@dataclass(frozen=True)
class PowerAllocation:
    d: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.d))


@dataclass(frozen=True)
class EigenSpectra:
    """Descending eigenvalues of Q1 Q1^H (lambda1) and Q2^H Q2 (lambda2)."""

    lambda1: np.ndarray
    lambda2: np.ndarray


def _descending_eigh(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(A)
    return w[..., ::-1], v[..., ::-1]


def _zero_null_modes(lam: np.ndarray, rank: int) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    lam[..., rank:] = 0.0
    return lam


def spectra(pair: ChannelPair) -> EigenSpectra:
    """Eigenvalues of both Gram matrices, sorted descending.

    Entries past the rank (min(M, K) for lambda1, min(N, K) for lambda2) are
    set to exactly zero.
    """
    K, M = pair.Q1.shape[-2:]
    N = pair.Q2.shape[-2]
    sigma1, sigma2 = gram_pair(pair)
    lam1 = np.linalg.eigvalsh(sigma1)[..., ::-1]
    lam2 = np.linalg.eigvalsh(sigma2)[..., ::-1]
    return EigenSpectra(_zero_null_modes(lam1, min(M, K)), _zero_null_modes(lam2, min(N, K)))


def optimal_precoder(pair: ChannelPair, alloc: PowerAllocation) -> np.ndarray:
    """Relay precoder P = V^H D^{1/2} U for a single realization.

    With Q1 Q1^H = U^H diag(lambda1) U and Q2^H Q2 = V^H diag(lambda2) V, both
    spectra descending, the precoded channel Q2 P Q1 decouples into modes with
    gains d_k * lambda1_k * lambda2_k.
    """
    sigma1, sigma2 = gram_pair(pair)
    _, E = _descending_eigh(sigma1)  # sigma1 = E diag E^H, so U = E^H
    _, F = _descending_eigh(sigma2)  # V = F^H
    d = np.asarray(alloc.d, dtype=float)
    if d.shape[-1] != sigma1.shape[-1]:
        raise ValueError(f"allocation has {d.shape[-1]} entries, relay has {sigma1.shape[-1]} antennas")
    return (F * np.sqrt(d)[..., None, :]) @ _herm(E)


def _water_fill_batch(gains: np.ndarray, total) -> np.ndarray:
    """Water-filling over the last axis; rows with no positive gain get zeros."""
    g = np.asarray(gains, dtype=float)
    total = np.asarray(total, dtype=float)[..., None]
    order = np.argsort(-g, axis=-1, kind="stable")
    gs = np.take_along_axis(g, order, axis=-1)
    # subnormal gains overflow to an infinite floor and stay inactive
    with np.errstate(divide="ignore", over="ignore"):
        inv = np.where(gs > 0, 1.0 / gs, np.inf)
    m = np.arange(1, g.shape[-1] + 1)
    # water level if the m strongest modes are active
    mu = (total + np.cumsum(np.where(np.isfinite(inv), inv, 0.0), axis=-1)) / m
    feasible = mu > inv
    # feasible sets form a prefix; the largest one is the optimum
    n_active = feasible.sum(axis=-1, keepdims=True)
    level = np.take_along_axis(mu, np.maximum(n_active - 1, 0), axis=-1)
    ds = np.where(m <= n_active, level - inv, 0.0)
    d = np.empty_like(ds)
    np.put_along_axis(d, order, ds, axis=-1)
    return d


def water_fill(gains, total: float) -> PowerAllocation:
    """Maximize sum ln(1 + d_k g_k) subject to sum d_k = total, d_k >= 0."""
    g = np.asarray(gains, dtype=float)
    if total <= 0:
        raise ValueError(f"total power must be positive, got {total}")
    if np.any(g < 0):
        raise ValueError("gains must be non-negative")
    if not np.any(g > 0):
        raise ValueError("water-filling needs at least one positive gain")
    return PowerAllocation(_water_fill_batch(g, total))


def precoded_capacity_samples(
    config: AntennaConfig, q: float, allocation_rule: str, mc: MonteCarloSettings
) -> np.ndarray:
    """Per-trial precoded capacity sum ln(1 + q d_k lambda1_k lambda2_k)."""
    if q <= 0:
        raise ValueError(f"relay power q must be positive, got {q}")
    if allocation_rule not in ALLOCATION_RULES:
        raise ValueError(f"unknown allocation rule {allocation_rule!r}; expected one of {ALLOCATION_RULES}")
    out = []
    for sid in mc.stream_chunks():
        sp = spectra(sample_pair_batch(config, mc.seed, sid))
        gains = q * sp.lambda1 * sp.lambda2
        if allocation_rule == "water_filling":
            d = _water_fill_batch(gains, config.K)
        else:
            d = np.ones_like(gains)
        out.append(np.log1p(d * gains).sum(axis=-1))
    return np.concatenate(out)


def precoded_ergodic(
    config: AntennaConfig, q: float, allocation_rule: str, mc: MonteCarloSettings
) -> ErgodicEstimate:
    return ErgodicEstimate.from_samples(precoded_capacity_samples(config, q, allocation_rule, mc), mc.seed)


def _density_factor(lam, L1: int, Lother: int):
    """eigen_density without its e^{-lambda} factor."""
    if not 1 <= L1 <= Lother:
        raise ValueError(f"need 1 <= L1 <= Lother, got L1={L1}, Lother={Lother}")
    a = Lother - L1
    lam = np.asarray(lam, dtype=float)
    acc = np.zeros_like(lam)
    for k in range(L1):
        acc = acc + factorial(k) / factorial(k + a) * laguerre_assoc(k, a, lam) ** 2
    return lam**a * acc / L1


def eigen_density(lam, L1: int, Lother: int):
    """Marginal density of an unordered eigenvalue of an L1 x L1 complex
    Wishart matrix with Lother degrees of freedom (identity covariance)."""
    out = _density_factor(lam, L1, Lother) * np.exp(-np.asarray(lam, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def integral_lower_bound(config: AntennaConfig, q: float, rule: QuadratureRule | None = None) -> float:
    """L1 * E[ln(1 + q l1 l2)] with l1, l2 drawn independently from the
    (L1, L2) and (L1, L3) eigenvalue marginals, by tensor Gauss-Laguerre.

    Exact for the keyhole channel (L1 = 1); for L1 > 1 the two eigenvalues are
    treated as independent, which the true joint law does not satisfy.
    """
    if q <= 0:
        raise ValueError(f"relay power q must be positive, got {q}")
    if rule is None:
        rule = gauss_laguerre_rule(DEFAULT_ORDER)
    L1, L2, L3 = config.ordered
    x = rule.nodes
    w1 = rule.weights * _density_factor(x, L1, L2)
    w2 = rule.weights * _density_factor(x, L1, L3)
    return float(L1 * (w1 @ np.log1p(q * np.outer(x, x)) @ w2))


def integral_convergence(config: AntennaConfig, q: float, orders=(64, DEFAULT_ORDER)) -> float:
    """|difference| of :func:`integral_lower_bound` between two quadrature orders."""
    lo, hi = (integral_lower_bound(config, q, gauss_laguerre_rule(n)) for n in orders)
    return abs(hi - lo)
