import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavcap.channels import (
    AntennaConfig,
    ChannelPair,
    RandomStream,
    complex_normals,
    gram_pair,
    philox4x32,
    sample_channel_pair,
    sample_direct_batch,
    sample_gaussian_matrix,
    sample_pair_batch,
)

# Random123 known-answer vectors for philox4x32-10
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    (
        (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
        (0xA4093822, 0x299F31D0),
        (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1),
    ),
]


@pytest.mark.parametrize("counter, key, expected", KAT)
def test_philox_known_answers(counter, key, expected):
    assert tuple(int(w) for w in philox4x32(counter, key)) == expected


def test_philox_vectorized_matches_scalar():
    ctr = np.arange(5, dtype=np.uint64)
    batch = philox4x32((ctr, 1, 2, 3), (7, 9))
    for i in range(5):
        single = philox4x32((i, 1, 2, 3), (7, 9))
        assert [int(b[i]) for b in batch] == [int(s) for s in single]


@pytest.fixture(scope="module")
def big_sample():
    return complex_normals(11, np.arange(1000), 0, 1000).ravel()


def test_unit_variance(big_sample):
    assert abs(np.mean(np.abs(big_sample) ** 2) - 1.0) < 0.005


def test_zero_mean(big_sample):
    m = big_sample.mean()
    assert abs(m.real) < 0.005 and abs(m.imag) < 0.005


def test_circular_symmetry(big_sample):
    assert abs(big_sample.real.var() - 0.5) < 0.005
    assert abs(big_sample.imag.var() - 0.5) < 0.005
    assert abs(np.mean(big_sample.real * big_sample.imag)) < 0.005
    # |z|^2 is Exp(1): its second moment is 2
    assert abs(np.mean(np.abs(big_sample) ** 4) - 2.0) < 0.03


def test_same_stream_is_bit_identical():
    s = RandomStream(seed=42, stream_id=7)
    a = sample_gaussian_matrix(3, 5, s)
    b = sample_gaussian_matrix(3, 5, s)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = sample_gaussian_matrix(2, 2, RandomStream(1, 0))
    b = sample_gaussian_matrix(2, 2, RandomStream(1, 1))
    c = sample_gaussian_matrix(2, 2, RandomStream(2, 0))
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_large_seed_and_stream_ids():
    s = RandomStream(2**64 - 1, 2**63 + 5)
    assert sample_gaussian_matrix(2, 2, s).shape == (2, 2)
    with pytest.raises(ValueError):
        RandomStream(-1, 0)


def test_matrix_is_row_major_prefix_of_stream():
    s = RandomStream(3, 4)
    m = sample_gaussian_matrix(2, 3, s)
    flat = complex_normals(3, [4], 0, 6)[0]
    assert np.array_equal(m.ravel(), flat)


def test_channel_pair_shapes_and_order():
    cfg = AntennaConfig(4, 2, 16)
    s = RandomStream(5, 9)
    pair = sample_channel_pair(cfg, s)
    assert pair.Q1.shape == (2, 4) and pair.Q2.shape == (16, 2)
    # Q1 is drawn first, Q2 continues the same stream
    assert np.array_equal(pair.Q1, sample_gaussian_matrix(2, 4, s))
    assert np.array_equal(pair.Q2, sample_gaussian_matrix(16, 2, s, offset=8))


def test_batch_matches_single_draws():
    cfg = AntennaConfig(3, 2, 5)
    batch = sample_pair_batch(cfg, 8, np.array([0, 17, 2**40]))
    for t, sid in enumerate([0, 17, 2**40]):
        single = sample_channel_pair(cfg, RandomStream(8, sid))
        assert np.array_equal(batch.Q1[t], single.Q1)
        assert np.array_equal(batch.Q2[t], single.Q2)
    H = sample_direct_batch(3, 5, 8, [17])
    assert np.array_equal(H[0], sample_gaussian_matrix(5, 3, RandomStream(8, 17)))


def test_q1_q2_entries_uncorrelated():
    pair = sample_pair_batch(AntennaConfig(1, 1, 1), 3, np.arange(10**6))
    a, b = pair.Q1.ravel(), pair.Q2.ravel()
    corr = np.mean(a * np.conj(b))
    assert abs(corr) < 0.01


def test_pair_rejects_mismatched_inner_dim():
    with pytest.raises(ValueError):
        ChannelPair(np.zeros((2, 3)), np.zeros((4, 3)))


def test_gram_pair_k1():
    pair = sample_channel_pair(AntennaConfig(4, 1, 6), RandomStream(0, 0))
    s1, s2 = gram_pair(pair)
    assert s1.shape == s2.shape == (1, 1)
    assert s1[0, 0].real == pytest.approx(np.sum(np.abs(pair.Q1) ** 2))
    assert s2[0, 0].real == pytest.approx(np.sum(np.abs(pair.Q2) ** 2))


def test_gram_pair_hermitian_psd():
    pair = sample_channel_pair(AntennaConfig(3, 5, 4), RandomStream(1, 2))
    for s in gram_pair(pair):
        assert np.max(np.abs(s - s.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(s).min() > -1e-10


def test_gram_trace_mean():
    K, M = 3, 4
    trials = 10**5
    pair = sample_pair_batch(AntennaConfig(M, K, 2), 21, np.arange(trials))
    s1, _ = gram_pair(pair)
    tr = np.trace(s1, axis1=-2, axis2=-1).real
    # trace is a sum of K*M unit-mean exponentials: variance K*M
    sigma = np.sqrt(K * M / trials)
    assert abs(tr.mean() - K * M) < 3 * sigma


def test_k1_sigma1_mean():
    pair = sample_pair_batch(AntennaConfig(5, 1, 1), 4, np.arange(50_000))
    s1, _ = gram_pair(pair)
    assert abs(s1[:, 0, 0].real.mean() - 5) < 3 * np.sqrt(5 / 50_000)


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30))
def test_ordered_dims(M, K, N):
    cfg = AntennaConfig(M, K, N)
    assert cfg.L1 <= cfg.L2 <= cfg.L3
    assert sorted((cfg.L1, cfg.L2, cfg.L3)) == sorted((M, K, N))


@pytest.mark.parametrize("dims", [(0, 1, 1), (1, -2, 1), (1, 1, 1.5)])
def test_config_rejects_bad_dims(dims):
    with pytest.raises(ValueError):
        AntennaConfig(*dims)
