"""Closed-form capacity bounds and relay-power conditions (nats, linear powers)."""
from __future__ import annotations

from dataclasses import dataclass
from math import exp, expm1, log1p

from .channels import AntennaConfig
from .special import EULER_GAMMA, harmonic


@dataclass(frozen=True)
class BoundReport:
    value_nats: float
    kind: str  # "lower_product" or "upper_direct"
    config: AntennaConfig | None
    power: float


def g_of_dims(config: AntennaConfig) -> float:
    """Mean over l = 1..L1 of H(L2 - l) + H(L3 - l), with (L1, L2, L3) the sorted dims.

    Equals E[ln det(Sigma1 Sigma2)] / L1 + 2*gamma, so it is invariant under
    any permutation of (M, K, N).
    """
    L1, L2, L3 = config.ordered
    return sum(harmonic(L2 - l) + harmonic(L3 - l) for l in range(1, L1 + 1)) / L1


def lower_bound_product(config: AntennaConfig, q: float) -> BoundReport:
    """L1 * ln(1 + q exp(g - 2 gamma)), a lower bound on the product-channel ergodic capacity."""
    if q <= 0:
        raise ValueError(f"relay power q must be positive, got {q}")
    value = config.L1 * log1p(q * exp(g_of_dims(config) - 2 * EULER_GAMMA))
    return BoundReport(value, "lower_product", config, q)


def upper_bound_direct(M: int, N: int, p: float) -> BoundReport:
    """M * ln(1 + p N), Jensen's upper bound on the direct-link ergodic capacity."""
    if p <= 0:
        raise ValueError(f"user power p must be positive, got {p}")
    if M < 1 or N < 1:
        raise ValueError(f"antenna counts must be positive, got M={M}, N={N}")
    return BoundReport(M * log1p(p * N), "upper_direct", None, p)


def snr_condition(q: float, K: int, p: float) -> bool:
    """True when the relayed link has the larger received SNR, i.e. qK > p."""
    if q <= 0 or p <= 0:
        raise ValueError("powers must be positive")
    return q * K > p


def required_q_closed(config: AntennaConfig, p: float) -> float:
    """Smallest q whose product lower bound reaches the direct upper bound.

    Only meaningful for K <= M <= N: the direct link's (M, N) are not
    interchangeable with K, so the dims are never reordered here.
    """
    M, K, N = config.M, config.K, config.N
    if not K <= M <= N:
        raise ValueError(f"closed-form relay power needs K <= M <= N, got (M, K, N) = ({M}, {K}, {N})")
    if p <= 0:
        raise ValueError(f"user power p must be positive, got {p}")
    # (1 + pN)^(M/K) - 1 without cancellation at small p
    growth = expm1(M / K * log1p(p * N))
    return growth * exp(2 * EULER_GAMMA - g_of_dims(config))


def required_q_approx(config: AntennaConfig, p: float) -> float:
    """Large-(M, N) form (exp(pMN/K) - 1) / (MN) of :func:`required_q_closed`."""
    if p <= 0:
        raise ValueError(f"user power p must be positive, got {p}")
    M, K, N = config.M, config.K, config.N
    return expm1(p * M * N / K) / (M * N)
