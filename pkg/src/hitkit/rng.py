"""Reproducible random streams.

Two flavours, both keyed by ``(seed, stream, index)`` and independent of how
many threads run:

* numpy ``Generator`` objects over Philox for the vectorised exact samplers,
  one per fixed-size block of paths;
* an inlined Philox4x32-10 for compiled per-path loops, where path ``p`` and
  draw number ``k`` form the counter.  Normals come from a 128-layer
  ziggurat whose rare slow path draws from a separate counter lane.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, uint64

BLOCK = 1 << 16

# stream identifiers
PLACE, SKELETON, GAUSS, EULER = 0, 1, 2, 3

_MASK = uint64(0xFFFFFFFF)
_M0 = uint64(0xD2511F53)
_M1 = uint64(0xCD9E8D57)
_W0 = uint64(0x9E3779B9)
_W1 = uint64(0xBB67AE85)


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    """Generator for block ``block`` of stream ``stream``."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def philox_key(seed: int, stream: int) -> tuple[int, int]:
    """Two 32-bit key words derived from the seed and stream id."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(stream), 0xF17))
    w = ss.generate_state(2, dtype=np.uint32)
    return int(w[0]), int(w[1])


@njit(cache=True, inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32 with 10 rounds; all words are uint64 holding 32-bit values."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> uint64(32)
        lo0 = p0 & _MASK
        hi1 = p1 >> uint64(32)
        lo1 = p1 & _MASK
        c0 = (hi1 ^ c1 ^ k0) & _MASK
        c1 = lo1
        c2 = (hi0 ^ c3 ^ k1) & _MASK
        c3 = lo0
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


@njit(cache=True, inline="always")
def _to_unit(a, b):
    # 53-bit uniform on [0, 1)
    return float((a >> uint64(5)) * uint64(67108864) + (b >> uint64(6))) * (1.0 / 9007199254740992.0)


def _ziggurat_tables():
    m1 = 2147483648.0
    dn = 3.442619855899
    tn = dn
    vn = 9.91256303526217e-3
    kn = np.zeros(128)
    wn = np.zeros(128)
    fn = np.zeros(128)
    q = vn / math.exp(-0.5 * dn * dn)
    kn[0] = (dn / q) * m1
    kn[1] = 0.0
    wn[0] = q / m1
    wn[127] = dn / m1
    fn[0] = 1.0
    fn[127] = math.exp(-0.5 * dn * dn)
    for i in range(126, 0, -1):
        dn = math.sqrt(-2.0 * math.log(vn / dn + math.exp(-0.5 * dn * dn)))
        kn[i + 1] = (dn / tn) * m1
        tn = dn
        fn[i] = math.exp(-0.5 * dn * dn)
        wn[i] = dn / m1
    return kn, wn, fn


_KN, _WN, _FN = _ziggurat_tables()
_ZR = 3.442619855899


@njit(cache=True, inline="always")
def _signed(w):
    v = np.int64(w)
    return v - 4294967296 if v >= 2147483648 else v


@njit(cache=True)
def _zig_slow(hz, iz, path, k, lane, k0, k1):
    # rejection part of the ziggurat; extra words come from counter lane
    # 0x80000000 | lane << 24 | j, j = 0, 1, ...
    j = 0
    buf0 = uint64(0)
    buf1 = uint64(0)
    buf2 = uint64(0)
    buf3 = uint64(0)
    pos = 4
    while True:
        x = hz * _WN[iz]
        if iz == 0:
            while True:
                if pos > 2:
                    buf0, buf1, buf2, buf3 = philox4x32(
                        uint64(k) & _MASK, uint64(0x80000000 | (lane << 24) | j),
                        uint64(path) & _MASK, uint64(path) >> uint64(32), uint64(k0), uint64(k1))
                    j += 1
                    pos = 0
                u1 = 1.0 - _to_unit(buf0 if pos == 0 else buf2, buf1 if pos == 0 else buf3)
                pos += 2
                if pos > 2:
                    buf0, buf1, buf2, buf3 = philox4x32(
                        uint64(k) & _MASK, uint64(0x80000000 | (lane << 24) | j),
                        uint64(path) & _MASK, uint64(path) >> uint64(32), uint64(k0), uint64(k1))
                    j += 1
                    pos = 0
                u2 = 1.0 - _to_unit(buf0 if pos == 0 else buf2, buf1 if pos == 0 else buf3)
                pos += 2
                x = -math.log(u1) / _ZR
                y = -math.log(u2)
                if y + y >= x * x:
                    break
            return _ZR + x if hz > 0 else -_ZR - x
        buf0, buf1, buf2, buf3 = philox4x32(
            uint64(k) & _MASK, uint64(0x80000000 | (lane << 24) | j),
            uint64(path) & _MASK, uint64(path) >> uint64(32), uint64(k0), uint64(k1))
        j += 1
        pos = 4
        u = _to_unit(buf0, buf1)
        if _FN[iz] + u * (_FN[iz - 1] - _FN[iz]) < math.exp(-0.5 * x * x):
            return x
        hz = _signed(buf2)
        iz = np.int64(buf3 & uint64(127))
        if abs(hz) < _KN[iz]:
            return hz * _WN[iz]


@njit(cache=True, inline="always")
def _zig(word, index_word, path, k, lane, k0, k1):
    hz = _signed(word)
    iz = np.int64(index_word & uint64(127))
    if abs(hz) < _KN[iz]:
        return hz * _WN[iz]
    return _zig_slow(hz, iz, path, k, lane, k0, k1)


@njit(cache=True, inline="always")
def normal_pair(path, k, k0, k1):
    """Two independent N(0,1) draws for path ``path``, draw number ``k``."""
    c0 = uint64(k) & _MASK
    c1 = uint64(k) >> uint64(32)
    c2 = uint64(path) & _MASK
    c3 = uint64(path) >> uint64(32)
    r0, r1, r2, r3 = philox4x32(c0, c1, c2, c3, uint64(k0), uint64(k1))
    return (_zig(r0, r2, path, k, 0, k0, k1), _zig(r1, r3, path, k, 1, k0, k1))


@njit(cache=True, inline="always")
def normal_pair_box_muller(path, k, k0, k1):
    """Box-Muller variant of :func:`normal_pair`; slower, kept as a reference."""
    """Two independent N(0,1) draws for path ``path``, draw number ``k``."""
    c0 = uint64(k) & _MASK
    c1 = uint64(k) >> uint64(32)
    c2 = uint64(path) & _MASK
    c3 = uint64(path) >> uint64(32)
    r0, r1, r2, r3 = philox4x32(c0, c1, c2, c3, uint64(k0), uint64(k1))
    u1 = 1.0 - _to_unit(r0, r1)
    u2 = _to_unit(r2, r3)
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u2
    return rad * np.cos(ang), rad * np.sin(ang)
