"""Sparse binary parity-check matrices, syndromes and triangular encoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .bits import BitVector


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseParityCheck:
    """An ``r x n`` binary matrix kept as sorted row and column adjacency.

    Construct with :meth:`from_rows` or :meth:`from_edges`; both validate that
    indices are in range, there are no duplicate edges and ``r <= n`` (``k = 0`` is a degenerate code).
    """

    n: int
    r: int
    row_ptr: np.ndarray
    row_idx: np.ndarray
    col_ptr: np.ndarray
    col_idx: np.ndarray

    @classmethod
    def from_edges(cls, n: int, r: int, rows: Iterable[int], cols: Iterable[int]) -> SparseParityCheck:
        rows = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=np.int64)
        cols = np.asarray(list(cols) if not isinstance(cols, np.ndarray) else cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise ValueError("row and column index arrays differ in length")
        if not 0 < r <= n:
            raise ValueError(f"need 0 < r <= n, got r={r}, n={n}")
        if rows.size and (rows.min() < 0 or rows.max() >= r):
            raise ValueError("row index out of range")
        if cols.size and (cols.min() < 0 or cols.max() >= n):
            raise ValueError("column index out of range")
        key = rows * n + cols
        if np.unique(key).size != key.size:
            raise ValueError("duplicate edge")

        order = np.lexsort((cols, rows))
        row_idx = cols[order].astype(np.int32)
        row_ptr = np.zeros(r + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=r), out=row_ptr[1:])

        order = np.lexsort((rows, cols))
        col_idx = rows[order].astype(np.int32)
        col_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=n), out=col_ptr[1:])

        return cls(n, r, _readonly(row_ptr), _readonly(row_idx), _readonly(col_ptr), _readonly(col_idx))

    @classmethod
    def from_rows(cls, n: int, rows_adj: Sequence[Iterable[int]]) -> SparseParityCheck:
        rr, cc = [], []
        for j, cols in enumerate(rows_adj):
            for c in cols:
                rr.append(j)
                cc.append(c)
        return cls.from_edges(n, len(rows_adj), rr, cc)

    @classmethod
    def from_dense(cls, dense) -> SparseParityCheck:
        dense = np.asarray(dense)
        rr, cc = np.nonzero(dense)
        return cls.from_edges(dense.shape[1], dense.shape[0], rr, cc)

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def num_edges(self) -> int:
        return int(self.row_idx.size)

    @property
    def rows_adj(self) -> list[list[int]]:
        return [self.row_idx[self.row_ptr[j]:self.row_ptr[j + 1]].tolist() for j in range(self.r)]

    @property
    def cols_adj(self) -> list[list[int]]:
        return [self.col_idx[self.col_ptr[i]:self.col_ptr[i + 1]].tolist() for i in range(self.n)]

    def row(self, j: int) -> np.ndarray:
        return self.row_idx[self.row_ptr[j]:self.row_ptr[j + 1]]

    def col(self, i: int) -> np.ndarray:
        return self.col_idx[self.col_ptr[i]:self.col_ptr[i + 1]]

    def row_weights(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_weights(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    @cached_property
    def edge_rows(self) -> np.ndarray:
        """Row index of every edge, in row-major edge order (parallel to ``row_idx``)."""
        return _readonly(np.repeat(np.arange(self.r, dtype=np.int32), self.row_weights()))

    @cached_property
    def row_groups(self) -> tuple[tuple[int, np.ndarray], ...]:
        """Edge indices of rows grouped by weight: ``((d, idx[rows_d, d]), ...)``."""
        weights = self.row_weights()
        groups = []
        for d in np.unique(weights):
            if d == 0:
                continue
            rows = np.nonzero(weights == d)[0]
            idx = self.row_ptr[rows][:, None] + np.arange(d)[None, :]
            groups.append((int(d), _readonly(idx)))
        return tuple(groups)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.r, self.n), dtype=np.uint8)
        dense[self.edge_rows, self.row_idx] = 1
        return dense

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseParityCheck):
            return NotImplemented
        return (
            self.n == other.n
            and self.r == other.r
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.row_idx, other.row_idx)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.row_idx.tobytes()))

    def __repr__(self) -> str:
        return f"SparseParityCheck(n={self.n}, r={self.r}, edges={self.num_edges})"


def syndrome_bits(h: SparseParityCheck, x: np.ndarray) -> np.ndarray:
    """Syndrome of an unpacked 0/1 array; returns a uint8 array of length ``r``."""
    if x.shape[-1] != h.n:
        raise ValueError(f"vector length {x.shape[-1]} != n={h.n}")
    ones = np.bincount(h.edge_rows, weights=x[h.row_idx], minlength=h.r)
    return (ones.astype(np.int64) & 1).astype(np.uint8)


def syndrome(h: SparseParityCheck, x: BitVector) -> BitVector:
    if x.length != h.n:
        raise ValueError(f"vector length {x.length} != n={h.n}")
    return BitVector.from_bits(syndrome_bits(h, x.to_numpy()))


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """A parity-check matrix plus construction metadata.

    With ``triangular`` set, row ``j`` ends at column ``k + j``, which makes the
    right ``r x r`` block lower triangular with a unit diagonal.
    """

    h: SparseParityCheck
    triangular: bool = False
    permutation: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.triangular and not is_lower_triangular(self.h):
            raise ValueError("matrix is not lower triangular in its last r columns")
        if self.permutation is not None:
            perm = np.asarray(self.permutation, dtype=np.int64)
            if perm.shape != (self.h.n,) or not np.array_equal(np.sort(perm), np.arange(self.h.n)):
                raise ValueError("permutation must be a permutation of range(n)")
            object.__setattr__(self, "permutation", _readonly(perm))

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def r(self) -> int:
        return self.h.r

    @property
    def k(self) -> int:
        return self.h.k

    def to_code_order(self, x: BitVector) -> BitVector:
        """Reorder external coordinates into code coordinates (identity without a permutation)."""
        if self.permutation is None:
            return x
        return BitVector.from_bits(x.to_numpy()[self.permutation])

    def from_code_order(self, x: BitVector) -> BitVector:
        if self.permutation is None:
            return x
        out = np.empty(self.n, dtype=np.uint8)
        out[self.permutation] = x.to_numpy()
        return BitVector.from_bits(out)


def is_lower_triangular(h: SparseParityCheck) -> bool:
    k = h.k
    for j in range(h.r):
        row = h.row(j)
        if row.size == 0 or row[-1] != k + j:
            return False
    return True


def encode_systematic_bits(code: LdpcCode, info: np.ndarray) -> np.ndarray:
    if not code.triangular:
        raise ValueError("systematic encoding needs a lower-triangular code")
    h = code.h
    k = h.k
    if info.shape != (k,):
        raise ValueError(f"info length {info.shape[0] if info.ndim else 0} != k={k}")
    c = np.zeros(h.n, dtype=np.uint8)
    c[:k] = info
    row_ptr, row_idx = h.row_ptr, h.row_idx
    for j in range(h.r):
        # last entry of row j is the pivot k + j; everything before it is known
        cols = row_idx[row_ptr[j]:row_ptr[j + 1] - 1]
        c[k + j] = c[cols].sum() & 1
    return c


def encode_systematic(code: LdpcCode, info: BitVector) -> BitVector:
    """Codeword whose first ``k`` bits are ``info``; parity solved by back-substitution."""
    if info.length != code.k:
        raise ValueError(f"info length {info.length} != k={code.k}")
    return BitVector.from_bits(encode_systematic_bits(code, info.to_numpy()))
