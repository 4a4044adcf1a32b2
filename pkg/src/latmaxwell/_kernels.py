"""Compiled kernels for the sparse backend.

Sites are packed into sortable int64 keys so that lexicographic (x, y, z)
order is plain integer order and a lattice shift is a constant key offset.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BITS = 21
BIAS = 1 << (BITS - 1)
MASK = (1 << BITS) - 1
# |coordinate| must stay below this for keys to be valid
COORD_LIMIT = BIAS - 1


def encode(coords: np.ndarray) -> np.ndarray:
    """Pack an (n, 3) integer array of sites into int64 keys."""
    c = np.asarray(coords, dtype=np.int64).reshape(-1, 3) + BIAS
    return (c[:, 0] << (2 * BITS)) | (c[:, 1] << BITS) | c[:, 2]


def decode(keys: np.ndarray) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((keys.size, 3), dtype=np.int64)
    out[:, 0] = (keys >> (2 * BITS)) & MASK
    out[:, 1] = (keys >> BITS) & MASK
    out[:, 2] = keys & MASK
    out -= BIAS
    return out


def shift_of(offset) -> int:
    dx, dy, dz = (int(v) for v in offset)
    return (dx << (2 * BITS)) + (dy << BITS) + dz


@njit(cache=True)
def gather(keys, values, seg_start, seg_stop, shifts, fre, fim):
    """Accumulate shifted, scaled segments into one sorted sparse frame.

    Segment ``j`` is ``keys[seg_start[j]:seg_stop[j]]`` shifted by
    ``shifts[j]`` and scaled by ``fre[j] + 1j*fim[j]``. Contributions to a
    destination key are summed in segment order, starting from +0, and exact
    zeros are dropped from the result.
    """
    m = shifts.shape[0]
    total = 0
    for j in range(m):
        total += seg_stop[j] - seg_start[j]
    out_keys = np.empty(total, dtype=np.int64)
    pos = seg_start.copy()
    n = 0
    while True:
        found = False
        best = np.int64(0)
        for j in range(m):
            if pos[j] < seg_stop[j]:
                k = keys[pos[j]] + shifts[j]
                if not found or k < best:
                    best = k
                    found = True
        if not found:
            break
        out_keys[n] = best
        n += 1
        for j in range(m):
            if pos[j] < seg_stop[j] and keys[pos[j]] + shifts[j] == best:
                pos[j] += 1

    re = np.zeros(n)
    im = np.zeros(n)
    for j in range(m):
        fr = fre[j]
        fi = fim[j]
        i = 0
        for s in range(seg_start[j], seg_stop[j]):
            k = keys[s] + shifts[j]
            while out_keys[i] != k:
                i += 1
            v = values[s]
            if fi == 0.0:
                re[i] += fr * v.real
                im[i] += fr * v.imag
            else:
                re[i] += fr * v.real - fi * v.imag
                im[i] += fr * v.imag + fi * v.real

    kept = 0
    for i in range(n):
        if re[i] != 0.0 or im[i] != 0.0:
            kept += 1
    res_keys = np.empty(kept, dtype=np.int64)
    res_vals = np.empty(kept, dtype=np.complex128)
    w = 0
    for i in range(n):
        if re[i] != 0.0 or im[i] != 0.0:
            res_keys[w] = out_keys[i]
            res_vals[w] = complex(re[i], im[i])
            w += 1
    return res_keys, res_vals
