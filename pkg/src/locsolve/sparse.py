"""Compressed-row sparse matrices, permutations and block partitioning.

Indices are 0-based internally. File formats and reports convert to 1-based
at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sps


class DimensionError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Square CSR matrix. The stored pattern doubles as the adjacency graph,
    so explicit zeros are kept."""

    n: int
    row_starts: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rs = np.array(self.row_starts, dtype=np.int64)
        ci = np.array(self.col_indices, dtype=np.int64)
        va = np.array(self.values, dtype=np.float64)
        n = int(self.n)
        if n < 0:
            raise DimensionError("negative dimension")
        if rs.shape != (n + 1,) or rs[0] != 0:
            raise ValueError("row_starts must have length n+1 and start at 0")
        if np.any(np.diff(rs) < 0):
            raise ValueError("row_starts must be non-decreasing")
        nnz = int(rs[-1])
        if ci.shape != (nnz,) or va.shape != (nnz,):
            raise ValueError("col_indices/values length must equal row_starts[n]")
        if nnz and (ci.min() < 0 or ci.max() >= n):
            raise IndexError("column index out of range")
        # strictly increasing columns within each row
        if nnz > 1:
            rows = np.repeat(np.arange(n), np.diff(rs))
            same_row = rows[1:] == rows[:-1]
            if np.any(np.diff(ci)[same_row] <= 0):
                raise ValueError("column indices must be strictly increasing within a row")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_starts", _frozen(rs))
        object.__setattr__(self, "col_indices", _frozen(ci))
        object.__setattr__(self, "values", _frozen(va))

    @property
    def nnz(self) -> int:
        return int(self.row_starts[-1])

    @classmethod
    def from_coo(cls, n, rows, cols, vals) -> "SparseMatrix":
        """Build from coordinate triplets; duplicates are summed, explicit zeros kept."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("triplet arrays differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
            raise IndexError("coordinate out of range")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            new = np.ones(rows.size, dtype=bool)
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            group = np.cumsum(new) - 1
            summed = np.zeros(int(group[-1]) + 1)
            np.add.at(summed, group, vals)
            rows, cols, vals = rows[new], cols[new], summed
        row_starts = np.zeros(n + 1, dtype=np.int64)
        np.add.at(row_starts, rows + 1, 1)
        return cls(n, np.cumsum(row_starts), cols, vals)

    @classmethod
    def from_dense(cls, a, keep_zeros: bool = False) -> "SparseMatrix":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError("matrix must be square")
        mask = np.ones_like(a, dtype=bool) if keep_zeros else a != 0
        r, c = np.nonzero(mask)
        return cls.from_coo(a.shape[0], r, c, a[r, c])

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = sps.csr_matrix(m)
        if m.shape[0] != m.shape[1]:
            raise DimensionError("matrix must be square")
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.shape[0], m.indptr, m.indices, m.data)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, np.arange(n + 1), np.arange(n), np.ones(n))

    @cached_property
    def _csr(self) -> sps.csr_matrix:
        return sps.csr_matrix((self.values, self.col_indices, self.row_starts), shape=(self.n, self.n))

    def to_scipy(self) -> sps.csr_matrix:
        """A fresh scipy copy, safe to mutate."""
        return self._csr.copy()

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.row_starts))
        out[rows, self.col_indices] = self.values
        return out

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.row_starts[i], self.row_starts[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.n), np.diff(self.row_starts))

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.n)
        rows = self.row_ids()
        on = rows == self.col_indices
        d[rows[on]] = self.values[on]
        return d

    def same(self, other: "SparseMatrix") -> bool:
        """Pattern and value identity (bitwise)."""
        return (
            self.n == other.n
            and np.array_equal(self.row_starts, other.row_starts)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.values, other.values)
        )

    def __matmul__(self, x):
        return spmv(self, x)


def _check_vec(x, n: int, name: str = "vector") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise DimensionError(f"{name} has shape {x.shape}, expected ({n},)")
    return x


def spmv(A: SparseMatrix, x) -> np.ndarray:
    x = _check_vec(x, A.n)
    return A._csr @ x


def residual(A: SparseMatrix, b, x) -> np.ndarray:
    b = _check_vec(b, A.n, "rhs")
    return b - spmv(A, x)


@dataclass(frozen=True, eq=False)
class Permutation:
    """forward[old] = new, inverse[new] = old."""

    forward: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_order(cls, order) -> "Permutation":
        """`order` lists old indices in their new positions."""
        inv = np.array(order, dtype=np.int64)
        if not np.array_equal(np.sort(inv), np.arange(inv.size)):
            raise ValueError("not a permutation")
        fwd = np.empty_like(inv)
        fwd[inv] = np.arange(inv.size)
        return cls(_frozen(fwd), _frozen(inv))

    @property
    def n(self) -> int:
        return int(self.forward.size)

    def gather(self, v) -> np.ndarray:
        """Reorder a vector into the new ordering (Q^T v)."""
        return np.asarray(v)[self.inverse]

    def scatter(self, w) -> np.ndarray:
        """Undo gather (Q w)."""
        w = np.asarray(w)
        out = np.empty_like(w)
        out[self.inverse] = w
        return out


@dataclass(frozen=True, eq=False)
class LocalDomain:
    """Sorted unique 0-based component indices inside a system of size n."""

    indices: np.ndarray
    n: int

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64).ravel()
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise IndexError("domain index out of range")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("domain indices must be sorted and unique")
        object.__setattr__(self, "indices", _frozen(idx))

    @classmethod
    def from_any(cls, indices, n: int) -> "LocalDomain":
        return cls(np.unique(np.asarray(indices, dtype=np.int64)), n)

    @classmethod
    def full(cls, n: int) -> "LocalDomain":
        return cls(np.arange(n), n)

    @property
    def K(self) -> int:
        return int(self.indices.size)

    @property
    def eta(self) -> float:
        return self.K / self.n if self.n else 0.0

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[self.indices] = True
        return m

    def complement(self) -> np.ndarray:
        return np.flatnonzero(~self.mask())

    def one_based(self) -> list[int]:
        return [int(i) + 1 for i in self.indices]

    def __len__(self):
        return self.K

    def __contains__(self, i):
        return bool(np.any(self.indices == i))


@dataclass(frozen=True, eq=False)
class PartitionedSystem:
    """[B E; F C] blocks of Q^T A Q with Ω_local ordered first."""

    B: SparseMatrix
    E: sps.csr_matrix
    F: sps.csr_matrix
    C: SparseMatrix
    perm: Permutation
    b_B: np.ndarray
    b_C: np.ndarray
    x_B0: np.ndarray
    x_C0: np.ndarray
    domain: LocalDomain = field(repr=False)

    @property
    def K(self) -> int:
        return self.B.n


def _block(csr: sps.csr_matrix, rows, cols) -> sps.csr_matrix:
    blk = csr[rows][:, cols].tocsr()
    blk.sort_indices()
    return blk


def extract_partition(A: SparseMatrix, b, x0, domain: LocalDomain) -> PartitionedSystem:
    b = _check_vec(b, A.n, "rhs")
    x0 = _check_vec(x0, A.n, "initial iterate")
    if domain.n != A.n:
        raise DimensionError("domain size does not match matrix")
    if domain.K == 0:
        raise ValueError("empty local domain")
    inner = domain.indices
    outer = domain.complement()
    perm = Permutation.from_order(np.concatenate([inner, outer]))
    # scipy fancy indexing keeps explicit zeros
    csr = A._csr
    B = SparseMatrix.from_scipy(_block(csr, inner, inner))
    C_blk = _block(csr, outer, outer)
    C = SparseMatrix(outer.size, C_blk.indptr, C_blk.indices, C_blk.data)
    return PartitionedSystem(
        B=B,
        E=_block(csr, inner, outer),
        F=_block(csr, outer, inner),
        C=C,
        perm=perm,
        b_B=b[inner].copy(),
        b_C=b[outer].copy(),
        x_B0=x0[inner].copy(),
        x_C0=x0[outer].copy(),
        domain=domain,
    )


def reassemble(part: PartitionedSystem) -> tuple[SparseMatrix, np.ndarray, np.ndarray]:
    """Inverse of extract_partition: rebuild (A, b, x0) in the original ordering."""
    full = sps.bmat([[part.B.to_scipy(), part.E], [part.F, part.C.to_scipy()]], format="coo")
    inv = part.perm.inverse
    A = SparseMatrix.from_coo(part.perm.n, inv[full.row], inv[full.col], full.data)
    b = part.perm.scatter(np.concatenate([part.b_B, part.b_C]))
    x0 = part.perm.scatter(np.concatenate([part.x_B0, part.x_C0]))
    return A, b, x0


def scatter_assemble(domain: LocalDomain, x_B, x_C) -> np.ndarray:
    x_B = np.asarray(x_B, dtype=np.float64)
    x_C = np.asarray(x_C, dtype=np.float64)
    if x_B.shape != (domain.K,) or x_C.shape != (domain.n - domain.K,):
        raise DimensionError("block sizes do not match the domain")
    out = np.empty(domain.n)
    m = domain.mask()
    out[m] = x_B
    out[~m] = x_C
    return out
