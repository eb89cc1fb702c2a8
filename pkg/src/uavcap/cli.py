"""Command-line front end. Every command writes a CSV table.

Exit status: 0 on success, 1 on numerical failure, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from typing import TextIO

import numpy as np

from . import __version__
from .bounds import lower_bound_product, upper_bound_direct
from .capacity import MonteCarloSettings, ergodic_estimate
from .channels import AntennaConfig
from .design import SweepTable, db_to_linear, k0_optimize, linear_to_db, min_q_numeric
from .errors import NumericalError
from .figures import DEFAULT_SWEEP_TRIALS, FIGURES, run_figure
from .precoding import DEFAULT_ORDER, eigen_density, integral_lower_bound
from .special import gauss_laguerre_rule

DEFAULT_POINT_TRIALS = 100_000
LN2 = math.log(2.0)


class UsageError(ValueError):
    pass


def parse_power(text: str, db: bool = False) -> float:
    """Parse ``"0.5"``, ``"-10dB"`` or (with ``db``) ``"-10"`` into a linear power."""
    s = text.strip()
    is_db = db
    if s.lower().endswith("db"):
        s, is_db = s[:-2], True
    try:
        value = float(s)
    except ValueError:
        raise UsageError(f"cannot parse power {text!r}") from None
    if is_db:
        return db_to_linear(value)
    if not value > 0:
        raise UsageError(f"linear power must be positive, got {text!r}")
    return value


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def write_csv(table: SweepTable, out: TextIO, units: str = "both") -> None:
    """Write ``table`` as CSV; columns named ``*_nats`` are expanded per ``units``."""
    if units not in ("nats", "bits", "both"):
        raise UsageError(f"units must be nats, bits or both, got {units!r}")
    metadata = {"tool": f"uavcap {__version__}", **table.metadata}
    for key, value in metadata.items():
        out.write(f"# {key}: {value}\n")

    plan: list[tuple[str, int, float]] = []
    for i, name in enumerate(table.columns):
        if name.endswith("_nats"):
            stem = name[: -len("_nats")]
            if units in ("nats", "both"):
                plan.append((name, i, 1.0))
            if units in ("bits", "both"):
                plan.append((f"{stem}_bits", i, 1.0 / LN2))
        else:
            plan.append((name, i, 1.0))
    out.write(",".join(name for name, _, _ in plan) + "\n")
    for row in table.rows:
        cells = []
        for _, i, scale in plan:
            v = row[i]
            cells.append(_fmt(v) if scale == 1.0 else _fmt(v * scale))
        out.write(",".join(cells) + "\n")


def _dims(parser: argparse.ArgumentParser, with_K: bool = True) -> None:
    parser.add_argument("--M", type=int, required=True, help="user antennas")
    if with_K:
        parser.add_argument("--K", type=int, required=True, help="relay antennas")
    parser.add_argument("--N", type=int, required=True, help="BTS antennas")


def _common(parser: argparse.ArgumentParser, trials: int | None) -> None:
    if trials is not None:
        parser.add_argument("--trials", type=int, default=trials)
        parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-", help="output path (default: stdout)")
    parser.add_argument("--units", choices=("nats", "bits", "both"), default="both")
    parser.add_argument("--db", action="store_true", help="read plain power values as dB")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavcap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"uavcap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ergodic", help="Monte Carlo ergodic capacity")
    p.add_argument("--model", choices=("direct", "product"), required=True)
    _dims(p)
    p.add_argument("--p", help="user power per antenna (direct model)")
    p.add_argument("--q", help="relay power (product model)")
    _common(p, DEFAULT_POINT_TRIALS)

    p = sub.add_parser("bound", help="closed-form capacity bound")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--lower", action="store_true", help="product-channel lower bound (needs --q)")
    kind.add_argument("--upper", action="store_true", help="direct-link upper bound (needs --p)")
    _dims(p)
    p.add_argument("--p")
    p.add_argument("--q")
    _common(p, None)

    p = sub.add_parser("min-q", help="minimal relay power matching the direct capacity")
    _dims(p)
    p.add_argument("--p", required=True)
    p.add_argument("--tol", type=float, default=1e-6, help="capacity gap tolerance, nats")
    _common(p, DEFAULT_POINT_TRIALS)

    p = sub.add_parser("k0", help="largest useful relay antenna count")
    _dims(p, with_K=False)
    p.add_argument("--q-hat", required=True, help="total relay power")
    p.add_argument("--eta", type=float, default=0.2)
    p.add_argument("--K-max", type=int, default=8)
    _common(p, None)

    p = sub.add_parser("pdf", help="marginal Wishart eigenvalue density on a grid")
    p.add_argument("--L1", type=int, required=True)
    p.add_argument("--Lother", type=int, required=True)
    p.add_argument("--lambda-max", type=float, default=50.0)
    p.add_argument("--points", type=int, default=201)
    _common(p, None)

    p = sub.add_parser("integral", help="double-integral bound by Gauss-Laguerre quadrature")
    _dims(p)
    p.add_argument("--q", required=True)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    _common(p, None)

    p = sub.add_parser("figure", help="sweep preset")
    p.add_argument("number", type=int, choices=FIGURES)
    _common(p, DEFAULT_SWEEP_TRIALS)
    return parser


def _power(args, name: str) -> float:
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return parse_power(value, args.db)


def _config(args) -> AntennaConfig:
    return AntennaConfig(args.M, args.K, args.N)


def _run(args) -> SweepTable:
    meta = {}
    if hasattr(args, "seed"):
        meta = {"seed": args.seed, "trials": args.trials}

    if args.command == "ergodic":
        config = _config(args)
        power = _power(args, "p" if args.model == "direct" else "q")
        e = ergodic_estimate(args.model, config, power, MonteCarloSettings(args.trials, args.seed))
        meta["model"] = args.model
        return SweepTable(
            ["M", "K", "N", "power", "power_db", "mean_nats", "stderr_nats"],
            [[config.M, config.K, config.N, power, linear_to_db(power), e.mean_nats, e.stderr_nats]],
            meta,
        )
    if args.command == "bound":
        config = _config(args)
        if args.lower:
            r = lower_bound_product(config, _power(args, "q"))
        else:
            r = upper_bound_direct(config.M, config.N, _power(args, "p"))
        meta["kind"] = r.kind
        return SweepTable(["M", "K", "N", "power", "bound_nats"], [[config.M, config.K, config.N, r.power, r.value_nats]], meta)
    if args.command == "min-q":
        config = _config(args)
        r = min_q_numeric(config, _power(args, "p"), MonteCarloSettings(args.trials, args.seed), args.tol)
        qc = math.nan if r.q_closed is None else r.q_closed
        return SweepTable(
            ["M", "K", "N", "p", "p_db", "q_numeric", "q_closed", "q_numeric_over_p",
             "direct_mean_nats", "product_mean_nats", "product_stderr_nats"],
            [[config.M, config.K, config.N, r.p, linear_to_db(r.p), r.q_numeric, qc, r.q_numeric / r.p,
              r.direct.mean_nats, r.product.mean_nats, r.product.stderr_nats]],
            meta,
        )
    if args.command == "k0":
        q_hat = parse_power(args.q_hat, args.db)
        r = k0_optimize(args.M, args.N, q_hat, args.eta, args.K_max)
        meta.update(K0=r.K0, eta=r.eta, q_hat=_fmt(q_hat))
        return SweepTable(["K", "increment_ratio"], [[K, v] for K, v in r.ratios], meta)
    if args.command == "pdf":
        if args.points < 2 or args.lambda_max <= 0:
            raise UsageError("need --points >= 2 and --lambda-max > 0")
        grid = np.linspace(0.0, args.lambda_max, args.points)
        dens = eigen_density(grid, args.L1, args.Lother)
        meta.update(L1=args.L1, Lother=args.Lother)
        return SweepTable(["lambda", "density"], [[x, y] for x, y in zip(grid, dens)], meta)
    if args.command == "integral":
        config = _config(args)
        q = _power(args, "q")
        value = integral_lower_bound(config, q, gauss_laguerre_rule(args.order))
        meta["order"] = args.order
        return SweepTable(["M", "K", "N", "q", "integral_lb_nats"], [[config.M, config.K, config.N, q, value]], meta)
    if args.command == "figure":
        if args.trials < 2:
            raise UsageError("--trials must be at least 2")
        return run_figure(args.number, trials=args.trials, seed=args.seed)
    raise UsageError(f"unknown command {args.command!r}")


_POWER_FLAGS = ("--p", "--q", "--q-hat")
_NEGATIVE = re.compile(r"^-\d|^-\.\d")


def _attach_negative_powers(argv: list[str]) -> list[str]:
    # argparse would read "-10dB" as an option; glue it to its flag instead
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _POWER_FLAGS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_powers(argv))
    try:
        table = _run(args)
        if args.out == "-":
            write_csv(table, sys.stdout, args.units)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write_csv(table, fh, args.units)
    except NumericalError as exc:
        print(f"uavcap: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"uavcap: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
