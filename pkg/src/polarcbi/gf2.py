"""Dense matrix algebra over GF(2).

Matrices are plain 2-D ``numpy.uint8`` arrays holding 0/1 entries. Index sets
passed to :func:`submatrix` and friends are 1-based, matching the usual
coding-theory notation (``A = {8, 10, ..., 16}``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: Kernel of the polar transform, x = u F.
F2 = np.array([[1, 0], [1, 1]], dtype=np.uint8)

MAX_DIM = 1 << 14


class SingularMatrixError(ValueError):
    """Raised when inverting a matrix that is not full rank over GF(2)."""


def as_bits(M, ndim: int | None = None) -> np.ndarray:
    """Validate ``M`` as a bit array and return it as ``uint8``.

    Raises ``ValueError`` for entries outside {0, 1}, wrong dimensionality,
    or empty axes.
    """
    arr = np.asarray(M)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D bit array, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit array entries must be 0 or 1")
    if ndim == 2 and min(arr.shape) < 1:
        raise ValueError(f"bit matrix must have rows, cols >= 1, got {arr.shape}")
    return arr.astype(np.uint8, copy=False)


def kronecker_power(base, n: int) -> np.ndarray:
    """n-fold Kronecker power of ``base`` over GF(2); ``n = 0`` gives [[1]]."""
    base = as_bits(base, 2)
    if n < 0:
        raise ValueError("n must be non-negative")
    r, c = base.shape
    if r**n > MAX_DIM or c**n > MAX_DIM:
        raise ValueError(f"Kronecker power too large: {r}^{n} x {c}^{n}")
    out = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        out = np.kron(out, base) & 1
    return out.astype(np.uint8)


def polar_kernel(N: int) -> np.ndarray:
    """Generator matrix ``F^{(x)n}`` for block length ``N = 2**n`` (no bit reversal)."""
    n = N.bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise ValueError(f"N must be a power of two, got {N}")
    return kronecker_power(F2, n)


def mat_vec_mul(v, M) -> np.ndarray:
    """Row-vector product ``v M`` over GF(2).

    ``v`` may also be a 2-D batch of row vectors, one per row.
    """
    M = as_bits(M, 2)
    v = as_bits(v)
    if v.shape[-1] != M.shape[0]:
        raise ValueError(f"length {v.shape[-1]} does not match {M.shape[0]} matrix rows")
    return ((v.astype(np.int64) @ M.astype(np.int64)) & 1).astype(np.uint8)


def _zero_based(index_set: Iterable[int], bound: int) -> np.ndarray:
    idx = np.asarray(list(index_set), dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > bound):
        raise IndexError(f"indices must lie in 1..{bound}")
    return idx - 1


def submatrix(M, row_set: Sequence[int], col_set: Sequence[int]) -> np.ndarray:
    """Entries ``M[i][j]`` for 1-based ``i`` in ``row_set`` and ``j`` in ``col_set``."""
    M = as_bits(M, 2)
    rows = _zero_based(row_set, M.shape[0])
    cols = _zero_based(col_set, M.shape[1])
    return M[np.ix_(rows, cols)]


@dataclass(frozen=True)
class RowEchelon:
    """Reduced row echelon form with the pivot column of each nonzero row (0-based)."""

    matrix: np.ndarray
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(M) -> RowEchelon:
    """Gauss-Jordan elimination with the leftmost-pivot rule."""
    mat = as_bits(M, 2).copy()
    m, n = mat.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(mat[row:, col])
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            mat[[row, p]] = mat[[p, row]]
        others = np.flatnonzero(mat[:, col])
        others = others[others != row]
        mat[others] ^= mat[row]
        pivots.append(col)
        row += 1
    return RowEchelon(mat, tuple(pivots))


def gf2_rank(M) -> int:
    return row_reduce(M).rank


def gf2_invert(M) -> np.ndarray:
    """Inverse of a square full-rank matrix over GF(2)."""
    M = as_bits(M, 2)
    k, c = M.shape
    if k != c:
        raise ValueError(f"matrix must be square, got {M.shape}")
    aug = np.concatenate([M, np.eye(k, dtype=np.uint8)], axis=1)
    red = row_reduce(aug)
    if red.pivots[:k] != tuple(range(k)):
        raise SingularMatrixError("matrix is singular over GF(2)")
    return red.matrix[:, k:].copy()


def gf2_matmul(A, B) -> np.ndarray:
    A = as_bits(A, 2)
    B = as_bits(B, 2)
    return ((A.astype(np.int64) @ B.astype(np.int64)) & 1).astype(np.uint8)
