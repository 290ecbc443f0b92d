import numpy as np
import pytest
from numba import njit, uint64
from scipy import stats

from hitkit import rng

# Known-answer vectors for Philox4x32-10 from the Random123 distribution.
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("ctr, key, expected", KAT)
def test_philox_known_answers(ctr, key, expected):
    out = rng.philox4x32(*(uint64(c) for c in ctr), *(uint64(k) for k in key))
    assert tuple(int(w) for w in out) == expected


@njit(cache=True)
def _normals(n, k0, k1, path):
    out = np.empty(2 * n)
    for k in range(n):
        a, b = rng.normal_pair(path, k, k0, k1)
        out[2 * k] = a
        out[2 * k + 1] = b
    return out


@njit(cache=True)
def _normals_bm(n, k0, k1, path):
    out = np.empty(2 * n)
    for k in range(n):
        a, b = rng.normal_pair_box_muller(path, k, k0, k1)
        out[2 * k] = a
        out[2 * k + 1] = b
    return out


@pytest.mark.parametrize("draw", [_normals, _normals_bm])
def test_normal_quality(draw):
    k0, k1 = rng.philox_key(7, rng.EULER)
    x = draw(500_000, k0, k1, 3)
    assert abs(x.mean()) < 4 / np.sqrt(x.size)
    assert abs(x.var() - 1) < 4 * np.sqrt(2 / x.size)
    assert abs(stats.kurtosis(x)) < 4 * np.sqrt(24 / x.size)
    assert stats.kstest(x, "norm").pvalue > 1e-3
    # tail mass beyond 3.5 sigma exercises the ziggurat's slow path
    tail = np.mean(np.abs(x) > 3.5)
    p = 2 * stats.norm.sf(3.5)
    assert abs(tail - p) < 5 * np.sqrt(p / x.size)


def test_normal_pairs_independent():
    k0, k1 = rng.philox_key(1, rng.EULER)
    x = _normals(300_000, k0, k1, 0)
    assert abs(np.corrcoef(x[0::2], x[1::2])[0, 1]) < 4 / np.sqrt(300_000)


def test_normal_streams_reproducible_and_distinct():
    k0, k1 = rng.philox_key(1, rng.EULER)
    a = _normals(100, k0, k1, 5)
    assert np.array_equal(a, _normals(100, k0, k1, 5))
    assert not np.array_equal(a, _normals(100, k0, k1, 6))
    j0, j1 = rng.philox_key(2, rng.EULER)
    assert not np.array_equal(a, _normals(100, j0, j1, 5))


def test_keys_distinct_per_stream():
    keys = {rng.philox_key(0, s) for s in (rng.PLACE, rng.SKELETON, rng.GAUSS, rng.EULER)}
    assert len(keys) == 4


def test_block_generators():
    a = rng.block_generator(3, rng.PLACE, 0).standard_normal(10)
    assert np.array_equal(a, rng.block_generator(3, rng.PLACE, 0).standard_normal(10))
    assert not np.array_equal(a, rng.block_generator(3, rng.PLACE, 1).standard_normal(10))
    assert not np.array_equal(a, rng.block_generator(3, rng.SKELETON, 0).standard_normal(10))
    assert not np.array_equal(a, rng.block_generator(4, rng.PLACE, 0).standard_normal(10))
