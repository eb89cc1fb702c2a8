"""Relay design solvers: minimal relay power and the useful antenna count."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import lower_bound_product, required_q_closed, upper_bound_direct
from .capacity import ErgodicEstimate, MonteCarloSettings, ergodic_estimate, mode_gains
from .channels import AntennaConfig
from .errors import BracketError, NumericalError
from .precoding import integral_lower_bound, precoded_ergodic

MAX_DOUBLINGS = 60
MAX_BISECTIONS = 200
# disjoint stream ranges per sweep row (rows never need more trials than this)
ROW_STREAM_STRIDE = 2**32


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class MinQResult:
    q_closed: float | None
    q_numeric: float
    p: float
    config: AntennaConfig
    tolerance_nats: float
    direct: ErgodicEstimate
    product: ErgodicEstimate


@dataclass(frozen=True)
class K0Result:
    K0: int
    eta: float
    q_hat: float
    ratios: list[tuple[int, float]]


def _capacity_curve(gains: np.ndarray):
    def curve(x: float) -> float:
        return float(np.log1p(x * gains).sum(axis=1).mean())

    return curve


def min_q_numeric(config: AntennaConfig, p: float, mc: MonteCarloSettings, tol: float = 1e-6) -> MinQResult:
    """Relay power q at which the product-channel ergodic capacity matches the direct one.

    The product channel is evaluated on one fixed set of draws for every q
    (common random numbers), which makes the estimated capacity a smooth,
    strictly increasing function of q; the root is then found by bisection
    on log q until the capacity gap is below ``tol`` nats.
    """
    if p <= 0:
        raise ValueError(f"user power p must be positive, got {p}")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    direct_gains = mode_gains("direct", config, mc)
    direct_caps = np.log1p(p * direct_gains).sum(axis=1)
    target = float(direct_caps.mean())
    product_gains = mode_gains("product", config, mc)
    S = _capacity_curve(product_gains)

    lo = hi = p
    for _ in range(MAX_DOUBLINGS):
        if S(hi) >= target:
            break
        hi *= 2.0
    else:
        raise BracketError(f"no upper bracket for q after {MAX_DOUBLINGS} doublings")
    for _ in range(MAX_DOUBLINGS):
        if S(lo) <= target:
            break
        lo /= 2.0
    else:
        raise BracketError(f"no lower bracket for q after {MAX_DOUBLINGS} halvings")

    for _ in range(MAX_BISECTIONS):
        q = math.sqrt(lo * hi)
        gap = S(q) - target
        if abs(gap) < tol:
            break
        lo, hi = (q, hi) if gap < 0 else (lo, q)
    else:
        raise NumericalError(f"bisection did not reach a capacity gap below {tol} nats")

    M, K, N = config.M, config.K, config.N
    q_closed = required_q_closed(config, p) if K <= M <= N else None
    product = ErgodicEstimate.from_samples(np.log1p(q * product_gains).sum(axis=1), mc.seed)
    return MinQResult(
        q_closed=q_closed,
        q_numeric=q,
        p=p,
        config=config,
        tolerance_nats=tol,
        direct=ErgodicEstimate.from_samples(direct_caps, mc.seed),
        product=product,
    )


def min_q_closed(config: AntennaConfig, p: float) -> float:
    return required_q_closed(config, p)


def capacity_increment_ratios(M: int, N: int, q_hat: float, K_max: int) -> list[tuple[int, float]]:
    """(K, S(K+1)/S(K) - 1) for K = 1..K_max, with S the closed-form lower
    bound at per-antenna relay power q = q_hat / K."""
    S = [lower_bound_product(AntennaConfig(M, K, N), q_hat / K).value_nats for K in range(1, K_max + 2)]
    return [(K, S[K] / S[K - 1] - 1.0) for K in range(1, K_max + 1)]


def k0_optimize(M: int, N: int, q_hat: float, eta: float, K_max: int = 8) -> K0Result:
    """Largest relay antenna count whose last added antenna still raised the
    capacity bound by a fraction of at least ``eta``.

    The ratio at K compares K+1 antennas against K, so K0 is one more than the
    largest K in 1..K_max-1 whose ratio clears ``eta``. When no increment
    clears it, K0 = 0 is returned with the table and the caller decides.
    """
    if q_hat <= 0:
        raise ValueError(f"total relay power must be positive, got {q_hat}")
    if eta <= 0:
        raise ValueError(f"threshold eta must be positive, got {eta}")
    if K_max < 2:
        raise ValueError(f"K_max must be at least 2, got {K_max}")
    ratios = capacity_increment_ratios(M, N, q_hat, K_max)
    passing = [K for K, r in ratios if K < K_max and r >= eta]
    K0 = max(passing) + 1 if passing else 0
    return K0Result(K0=K0, eta=eta, q_hat=q_hat, ratios=ratios)


QUANTITIES = (
    "direct_mc",
    "product_mc",
    "upper_direct",
    "lower_product",
    "precoded_wf_mc",
    "precoded_eq_mc",
    "integral_lb",
    "min_q",
)
SWEEP_PARAMETERS = ("p", "q", "q_hat", "K")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter over ``grid`` (linear units, or antenna counts for K).

    Powers not swept are fixed by ``p``, ``q`` or ``q_hat``; ``q_over_p`` ties
    the relay power to the user power (q = q_over_p * p). ``q_hat`` fixes the
    total relay power, giving q = q_hat / K.
    """

    parameter: str
    grid: Sequence[float]
    M: int
    K: int
    N: int
    quantities: Sequence[str]
    p: float | None = None
    q: float | None = None
    q_hat: float | None = None
    q_over_p: float | None = None
    trials: int = 10_000
    seed: int = 0
    label: str | None = None


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[list[float]]
    metadata: dict[str, object] = field(default_factory=dict)

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _resolve_point(spec: SweepSpec, x: float) -> tuple[AntennaConfig, float | None, float | None]:
    K = int(x) if spec.parameter == "K" else spec.K
    p = x if spec.parameter == "p" else spec.p
    if spec.parameter == "q":
        q = x
    elif spec.parameter == "q_hat":
        q = x / K
    elif spec.q_over_p is not None and p is not None:
        q = spec.q_over_p * p
    elif spec.q_hat is not None:
        q = spec.q_hat / K
    else:
        q = spec.q
    return AntennaConfig(spec.M, K, spec.N), p, q


def _need(value, name: str, quantity: str):
    if value is None:
        raise ValueError(f"quantity {quantity!r} needs a value for {name}")
    return value


def sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the requested quantities at every grid point.

    Capacity columns are in nats. Row i uses trial streams starting at
    i * 2**32, so rows never share draws, and a single-point sweep matches
    direct calls with the same seed.
    """
    if spec.parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {spec.parameter!r}; expected one of {SWEEP_PARAMETERS}")
    if len(spec.grid) == 0:
        raise ValueError("sweep grid is empty")
    unknown = set(spec.quantities) - set(QUANTITIES)
    if unknown:
        raise ValueError(f"unknown quantities {sorted(unknown)}; expected from {QUANTITIES}")

    columns = [spec.parameter]
    if spec.parameter in ("p", "q", "q_hat"):
        columns.append(f"{spec.parameter}_db")
    fixed_powers = ["q"] if spec.parameter != "q" else []
    if spec.parameter != "p" and spec.p is not None:
        fixed_powers.insert(0, "p")
    columns += ["M", "K", "N", *fixed_powers]
    for name in spec.quantities:
        if name.endswith("_mc"):
            columns += [f"{name[:-3]}_mean_nats", f"{name[:-3]}_stderr_nats"]
        elif name == "min_q":
            columns += ["q_numeric", "q_closed", "q_numeric_over_p", "q_closed_over_p"]
        else:
            columns.append(f"{name}_nats")

    rows = []
    for i, x in enumerate(spec.grid):
        config, p, q = _resolve_point(spec, x)
        mc = MonteCarloSettings(spec.trials, spec.seed, stream_offset=i * ROW_STREAM_STRIDE)
        row: list[float] = [float(x)]
        if spec.parameter in ("p", "q", "q_hat"):
            row.append(linear_to_db(x))
        row += [config.M, config.K, config.N]
        row += [math.nan if v is None else v for name, v in (("p", p), ("q", q)) if name in fixed_powers]
        for name in spec.quantities:
            if name == "direct_mc":
                e = ergodic_estimate("direct", config, _need(p, "p", name), mc)
                row += [e.mean_nats, e.stderr_nats]
            elif name == "product_mc":
                e = ergodic_estimate("product", config, _need(q, "q", name), mc)
                row += [e.mean_nats, e.stderr_nats]
            elif name == "precoded_wf_mc":
                e = precoded_ergodic(config, _need(q, "q", name), "water_filling", mc)
                row += [e.mean_nats, e.stderr_nats]
            elif name == "precoded_eq_mc":
                e = precoded_ergodic(config, _need(q, "q", name), "equal", mc)
                row += [e.mean_nats, e.stderr_nats]
            elif name == "upper_direct":
                row.append(upper_bound_direct(config.M, config.N, _need(p, "p", name)).value_nats)
            elif name == "lower_product":
                row.append(lower_bound_product(config, _need(q, "q", name)).value_nats)
            elif name == "integral_lb":
                row.append(integral_lower_bound(config, _need(q, "q", name)))
            elif name == "min_q":
                pp = _need(p, "p", name)
                res = min_q_numeric(config, pp, mc)
                qc = math.nan if res.q_closed is None else res.q_closed
                row += [res.q_numeric, qc, res.q_numeric / pp, qc / pp]
        rows.append(row)

    metadata = {
        "tool": f"uavcap {__version__}",
        "label": spec.label or f"sweep over {spec.parameter}",
        "seed": spec.seed,
        "trials": spec.trials,
        "units": "capacities in nats; powers linear",
    }
    return SweepTable(columns, rows, metadata)
