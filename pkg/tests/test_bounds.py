import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from uavcap.bounds import (
    g_of_dims,
    lower_bound_product,
    required_q_approx,
    required_q_closed,
    snr_condition,
    upper_bound_direct,
)
from uavcap.capacity import MonteCarloSettings, ergodic_estimate
from uavcap.channels import AntennaConfig

GAMMA = float(mpmath.euler)


def rational_harmonic(n):
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def g_oracle(M, K, N):
    L1, L2, L3 = sorted((M, K, N))
    total = sum(rational_harmonic(L2 - l) + rational_harmonic(L3 - l) for l in range(1, L1 + 1))
    return float(total / L1)


def test_g_trivial():
    assert g_of_dims(AntennaConfig(1, 1, 1)) == 0.0


def test_g_keyhole_value():
    assert g_oracle(4, 1, 16) == pytest.approx(5.151562326562327, abs=1e-14)
    assert g_of_dims(AntennaConfig(4, 1, 16)) == pytest.approx(g_oracle(4, 1, 16), abs=1e-14)


def test_g_permutations():
    vals = {g_of_dims(AntennaConfig(*perm)) for perm in itertools.permutations((4, 1, 16))}
    assert len(vals) == 1


@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 20))
def test_g_matches_rational_oracle(M, K, N):
    assert g_of_dims(AntennaConfig(M, K, N)) == pytest.approx(g_oracle(M, K, N), abs=1e-13)


def test_lower_bound_siso():
    ref = math.log1p(math.exp(-2 * GAMMA))
    assert ref == pytest.approx(0.27401668873044754, abs=1e-15)
    assert lower_bound_product(AntennaConfig(1, 1, 1), 1.0).value_nats == pytest.approx(ref, abs=1e-15)


def test_lower_bound_keyhole():
    ref = math.log1p(math.exp(g_oracle(4, 1, 16) - 2 * GAMMA))
    r = lower_bound_product(AntennaConfig(4, 1, 16), 1.0)
    assert r.value_nats == pytest.approx(ref, abs=1e-13)
    assert r.value_nats == pytest.approx(4.0153, abs=5e-5)
    assert r.kind == "lower_product" and r.power == 1.0


def test_lower_bound_vanishes():
    assert lower_bound_product(AntennaConfig(3, 2, 5), 1e-15).value_nats < 1e-12


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.floats(1e-3, 1e3))
def test_lower_bound_permutation_invariant(M, K, N, q):
    vals = {lower_bound_product(AntennaConfig(*perm), q).value_nats for perm in itertools.permutations((M, K, N))}
    assert len(vals) == 1


def test_upper_bound_values():
    assert upper_bound_direct(4, 16, 1.0).value_nats == pytest.approx(4 * math.log(17), abs=1e-14)
    assert upper_bound_direct(4, 16, 1e-15).value_nats < 1e-12
    assert upper_bound_direct(4, 16, 1.0).kind == "upper_direct"


def test_upper_bound_dominates_monte_carlo():
    e = ergodic_estimate("direct", AntennaConfig(4, 1, 16), 1.0, MonteCarloSettings(20_000, seed=2))
    assert e.mean_nats <= upper_bound_direct(4, 16, 1.0).value_nats


@pytest.mark.parametrize("fn, args", [(lower_bound_product, (AntennaConfig(1, 1, 1), 0.0)), (upper_bound_direct, (1, 1, -1.0))])
def test_bounds_reject_nonpositive_power(fn, args):
    with pytest.raises(ValueError):
        fn(*args)


@pytest.mark.parametrize(
    "q, K, p, expected",
    [(1.0, 1, 1.0, False), (0.3, 4, 1.0, True), (0.25, 4, 1.0, False), (0.5, 2, 1.0, False)],
)
def test_snr_condition(q, K, p, expected):
    assert snr_condition(q, K, p) is expected


def test_required_q_closed_value():
    oracle = (2.6**2 - 1) * math.exp(2 * GAMMA - g_oracle(4, 2, 16))
    q = required_q_closed(AntennaConfig(4, 2, 16), 0.1)
    assert q == pytest.approx(oracle, rel=1e-13)
    assert q == pytest.approx(0.12923, abs=5e-6)


@pytest.mark.parametrize("dims, p", [((4, 2, 16), 0.1), ((4, 1, 16), 1.0), ((8, 3, 8), 0.02), ((2, 2, 2), 5.0)])
def test_required_q_closed_fixed_point(dims, p):
    cfg = AntennaConfig(*dims)
    q = required_q_closed(cfg, p)
    lower = lower_bound_product(cfg, q).value_nats
    upper = upper_bound_direct(cfg.M, cfg.N, p).value_nats
    assert lower == pytest.approx(upper, abs=1e-9)


def test_required_q_closed_vanishes():
    assert required_q_closed(AntennaConfig(4, 2, 16), 1e-14) < 1e-12


@pytest.mark.parametrize("dims", [(2, 4, 16), (4, 2, 3), (16, 2, 4)])
def test_required_q_closed_rejects_unordered(dims):
    with pytest.raises(ValueError):
        required_q_closed(AntennaConfig(*dims), 0.1)


def test_required_q_approx_small_power_limit():
    cfg = AntennaConfig(8, 2, 32)
    p = 1e-9
    assert required_q_approx(cfg, p) == pytest.approx(p / cfg.K, rel=1e-6)


def test_required_q_approx_close_to_closed_form():
    cfg = AntennaConfig(64, 2, 64)
    ratio = required_q_approx(cfg, 1e-4) / required_q_closed(cfg, 1e-4)
    assert abs(ratio - 1) <= 0.15


def test_required_q_approx_monotone_in_power():
    cfg = AntennaConfig(4, 2, 16)
    vals = [required_q_approx(cfg, p) for p in (1e-3, 1e-2, 0.1, 1.0, 3.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_required_q_approx_decreases_in_K():
    vals = [required_q_approx(AntennaConfig(64, K, 64), 0.01) for K in range(1, 9)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # ln(MN q + 1) = pMN / K exactly: affine in 1/K with zero intercept
    for K, v in enumerate(vals, start=1):
        assert math.log1p(64 * 64 * v) == pytest.approx(0.01 * 64 * 64 / K, rel=1e-12)


@pytest.mark.parametrize("q", [0.1, 1.0, 10.0])
def test_sandwich_small_grid(q):
    mc = MonteCarloSettings(4000, seed=5)
    for dims in [(1, 2, 4), (2, 2, 2), (4, 1, 2)]:
        cfg = AntennaConfig(*dims)
        prod = ergodic_estimate("product", cfg, q, mc)
        assert prod.mean_nats >= lower_bound_product(cfg, q).value_nats - 3 * prod.stderr_nats
        direct = ergodic_estimate("direct", cfg, q, mc)
        assert direct.mean_nats <= upper_bound_direct(cfg.M, cfg.N, q).value_nats + 3 * direct.stderr_nats
