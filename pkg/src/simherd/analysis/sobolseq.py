"""Sobol' low-discrepancy sequence (Gray-code construction, 32-bit).

Direction numbers are the published Joe-Kuo values for the first 40
dimensions (primitive polynomial and initial m_i per dimension); the table
is cross-checked against an independent implementation in the test suite.
Point 0 of the unscrambled sequence is the origin.
"""

from __future__ import annotations

import numpy as np

_BITS = 32

# Primitive polynomial per dimension, full binary encoding (x^3 + x + 1 -> 0b1011).
_POLY = [
    1, 3, 7, 11, 13, 19, 25, 37, 41, 47, 55, 59, 61, 67, 91, 97, 103, 109,
    115, 131, 137, 143, 145, 157, 167, 171, 185, 191, 193, 203, 211, 213,
    229, 239, 241, 247, 253, 285, 299, 301,
]

# Initial direction numbers m_1..m_s per dimension.
_MINIT = [
    [1], [1], [1, 3], [1, 3, 1], [1, 1, 1], [1, 1, 3, 3], [1, 3, 5, 13],
    [1, 1, 5, 5, 17], [1, 1, 5, 5, 5], [1, 1, 7, 11, 19], [1, 1, 5, 1, 1],
    [1, 1, 1, 3, 11], [1, 3, 5, 5, 31], [1, 3, 3, 9, 7, 49],
    [1, 1, 1, 15, 21, 21], [1, 3, 1, 13, 27, 49], [1, 1, 1, 15, 7, 5],
    [1, 3, 1, 15, 13, 25], [1, 1, 5, 5, 19, 61], [1, 3, 7, 11, 23, 15, 103],
    [1, 3, 7, 13, 13, 15, 69], [1, 1, 3, 13, 7, 35, 63],
    [1, 3, 5, 9, 1, 25, 53], [1, 3, 1, 13, 9, 35, 107],
    [1, 3, 1, 5, 27, 61, 31], [1, 1, 5, 11, 19, 41, 61],
    [1, 3, 5, 3, 3, 13, 69], [1, 1, 7, 13, 1, 19, 1],
    [1, 3, 7, 5, 13, 19, 59], [1, 1, 3, 9, 25, 29, 41],
    [1, 3, 5, 13, 23, 1, 55], [1, 3, 7, 3, 13, 59, 17],
    [1, 3, 1, 3, 5, 53, 69], [1, 1, 5, 5, 23, 33, 13],
    [1, 1, 7, 7, 1, 61, 123], [1, 1, 7, 9, 13, 61, 49],
    [1, 3, 3, 5, 3, 55, 33], [1, 3, 1, 15, 31, 13, 49, 245],
    [1, 3, 5, 15, 31, 59, 63, 97], [1, 3, 1, 11, 11, 11, 77, 249],
]

MAX_DIM = len(_POLY)


def _direction_vectors(dim_index: int, nbits: int) -> list[int]:
    """v_1..v_nbits for one dimension (0-based index into the table)."""
    v = [0] * (nbits + 1)
    if dim_index == 0:
        for k in range(1, nbits + 1):
            v[k] = 1 << (_BITS - k)
        return v
    p = _POLY[dim_index]
    s = p.bit_length() - 1
    m = _MINIT[dim_index]
    for k in range(1, min(s, nbits) + 1):
        v[k] = m[k - 1] << (_BITS - k)
    for k in range(s + 1, nbits + 1):
        v[k] = v[k - s] ^ (v[k - s] >> s)
        for i in range(1, s):
            if (p >> (s - i)) & 1:
                v[k] ^= v[k - i]
    return v


def sobol_points(n: int, dim: int) -> np.ndarray:
    """First n points of the sequence in [0,1)^dim, point 0 = origin."""
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {dim}")
    if n < 1:
        raise ValueError("need at least one point")
    nbits = max(1, (n - 1).bit_length())
    out = np.zeros((n, dim))
    scale = 2.0**-_BITS
    for j in range(dim):
        v = _direction_vectors(j, nbits)
        x = 0
        col = out[:, j]
        for i in range(1, n):
            # Gray-code step: flip by v[z], z = index of lowest zero bit of i-1
            t = i - 1
            z = 1
            while t & 1:
                t >>= 1
                z += 1
            x ^= v[z]
            col[i] = x * scale
    return out
