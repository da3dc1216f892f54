"""Dense GF(2) linear algebra for brute-force oracles."""
from __future__ import annotations

import numpy as np


def to_gf2(matrix) -> np.ndarray:
    return np.array(matrix, dtype=np.uint8) % 2


def gf2_rank(matrix) -> int:
    """Rank over GF(2) by row reduction."""
    mat = to_gf2(matrix)
    if mat.ndim != 2 or mat.size == 0:
        return 0
    mat = mat.copy()
    m, n = mat.shape
    rank = 0
    row = 0
    for col in range(n):
        hits = np.flatnonzero(mat[row:, col])
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        below = np.flatnonzero(mat[:, col])
        below = below[below != row]
        if below.size:
            mat[below, :] ^= mat[row, :]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def gf2_matmul(a, b) -> np.ndarray:
    return (to_gf2(a).astype(np.int64) @ to_gf2(b).astype(np.int64)) % 2


def in_span(basis, vector) -> bool:
    """True iff vector lies in the column span of basis."""
    basis = to_gf2(basis)
    vec = to_gf2(vector).reshape(-1, 1)
    if basis.size == 0:
        return not vec.any()
    return gf2_rank(np.concatenate([basis, vec], axis=1)) == gf2_rank(basis)


def nullity(matrix) -> int:
    """Dimension of the right nullspace."""
    mat = to_gf2(matrix)
    return mat.shape[1] - gf2_rank(mat)
