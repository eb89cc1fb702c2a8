"""Sweep presets behind ``uavcap figure N`` (N = 3..7).

Powers are swept in dB on fixed grids; every preset returns one SweepTable.
"""
from __future__ import annotations

from .design import (
    SweepSpec,
    SweepTable,
    capacity_increment_ratios,
    db_to_linear,
    k0_optimize,
    sweep,
)

FIGURES = (3, 4, 5, 6, 7)
DEFAULT_SWEEP_TRIALS = 10_000


def _db_grid(start: float, stop: float, step: float) -> list[float]:
    n = int(round((stop - start) / step)) + 1
    return [db_to_linear(start + i * step) for i in range(n)]


def _stack(tables: list[SweepTable], label: str) -> SweepTable:
    columns = tables[0].columns
    rows = [row for t in tables for row in t.rows]
    metadata = dict(tables[0].metadata, label=label)
    return SweepTable(list(columns), rows, metadata)


def _select(table: SweepTable, columns: list[str]) -> SweepTable:
    idx = [table.columns.index(c) for c in columns]
    return SweepTable(columns, [[row[i] for i in idx] for row in table.rows], dict(table.metadata))


def figure3(trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0) -> SweepTable:
    """M=4, N=16, q = 10p, K in {1, 2, 4}: capacities with both bounds."""
    grid = _db_grid(-10, 20, 5)
    tables = [
        sweep(SweepSpec("p", grid, 4, K, 16, ("direct_mc", "product_mc", "upper_direct", "lower_product"),
                        q_over_p=10.0, trials=trials, seed=seed))
        for K in (1, 2, 4)
    ]
    return _stack(tables, "figure 3: ergodic capacity and bounds, M=4 N=16 q=10p")


def _min_q_tables(trials: int, seed: int) -> SweepTable:
    grid = _db_grid(-20, 10, 5)
    tables = [sweep(SweepSpec("p", grid, 4, K, 16, ("min_q",), trials=trials, seed=seed)) for K in (1, 2)]
    return _stack(tables, "")


def figure4(trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0) -> SweepTable:
    """Minimal relay power q (numeric and closed form), M=4, N=16, K in {1, 2}."""
    t = _select(_min_q_tables(trials, seed), ["p", "p_db", "M", "K", "N", "q_numeric", "q_closed"])
    t.metadata["label"] = "figure 4: minimal q with equal ergodic capacity, M=4 N=16"
    return t


def figure7(trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0) -> SweepTable:
    """Ratio q/p of the figure 4 solutions."""
    t = _select(_min_q_tables(trials, seed), ["p", "p_db", "M", "K", "N", "q_numeric_over_p", "q_closed_over_p"])
    t.metadata["label"] = "figure 7: ratio q/p of the minimal relay power, M=4 N=16"
    return t


def figure5(trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0) -> SweepTable:
    """M=10, N=32, K in {4, 8}, total relay power q_hat swept (q = q_hat/K)."""
    grid = _db_grid(-10, 20, 5)
    quantities = ("product_mc", "precoded_wf_mc", "precoded_eq_mc", "integral_lb", "lower_product")
    tables = [sweep(SweepSpec("q_hat", grid, 10, K, 32, quantities, trials=trials, seed=seed)) for K in (8, 4)]
    t = _stack(tables, "figure 5: fixed total relay power with precoding, M=10 N=32")
    t.metadata["axis"] = "q_hat is the total relay power; per-antenna q = q_hat / K"
    return t


def figure6(trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0, eta: float = 0.2, K_max: int = 8) -> SweepTable:
    """Capacity-increment ratio of the closed-form bound, M=12, N=32, K=1..8."""
    q_hats_db = (-10, 0, 10)
    columns = ["K"] + [f"ratio_at_{'minus' if d < 0 else ''}{abs(d)}dB" for d in q_hats_db]
    per_power = [capacity_increment_ratios(12, 32, db_to_linear(d), K_max) for d in q_hats_db]
    rows = [[K] + [ratios[K - 1][1] for ratios in per_power] for K in range(1, K_max + 1)]
    k0 = [k0_optimize(12, 32, db_to_linear(d), eta, K_max).K0 for d in q_hats_db]
    metadata = {
        "label": "figure 6: capacity increment ratio S(K+1)/S(K)-1, M=12 N=32",
        "eta": eta,
        "K0": " ".join(f"{d}dB:{k}" for d, k in zip(q_hats_db, k0)),
        "units": "dimensionless ratios",
    }
    return SweepTable(columns, rows, metadata)


def run_figure(number: int, trials: int = DEFAULT_SWEEP_TRIALS, seed: int = 0) -> SweepTable:
    builders = {3: figure3, 4: figure4, 5: figure5, 6: figure6, 7: figure7}
    if number not in builders:
        raise ValueError(f"unknown figure {number}; available: {FIGURES}")
    table = builders[number](trials=trials, seed=seed)
    table.metadata.setdefault("seed", seed)
    table.metadata.setdefault("trials", trials)
    return table
