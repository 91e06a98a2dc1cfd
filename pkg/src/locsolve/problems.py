"""Reference and randomly generated test systems."""
from __future__ import annotations

import os

import numpy as np

from .sparse import SparseMatrix, spmv

SEED_ENV = "LOCSOLVE_SEED"


def default_seed(fallback: int = 20240117) -> int:
    return int(os.environ.get(SEED_ENV, fallback))


def rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(default_seed() if seed is None else seed)


def example_tridiagonal() -> tuple[SparseMatrix, np.ndarray, np.ndarray, np.ndarray]:
    """9x9 tridiagonal system with a_{i,i+1} = a_{i+1,i} = -1/(i+1).

    Returns (A, b, x_exact, x0) with b = A x_exact.
    """
    n = 9
    a = np.eye(n)
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = -1.0 / (i + 2)
    A = SparseMatrix.from_dense(a)
    x = 10.0 ** -np.arange(1, n + 1)
    x0 = np.concatenate([[1.0, 1e-1], 1.001 * 10.0 ** -np.arange(3, n + 1)])
    return A, spmv(A, x), x, x0


def banded(n: int, bandwidth: int, gen: np.random.Generator, dominance: float = 1.5) -> SparseMatrix:
    """Random banded matrix with a strictly dominant positive diagonal."""
    rows, cols = [], []
    for k in range(-bandwidth, bandwidth + 1):
        i = np.arange(max(0, -k), min(n, n - k))
        rows.append(i)
        cols.append(i + k)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = gen.uniform(-1.0, 1.0, rows.size)
    off = rows != cols
    rowsum = np.zeros(n)
    np.add.at(rowsum, rows[off], np.abs(vals[off]))
    vals[~off] = dominance * rowsum[rows[~off]] + 1.0
    return SparseMatrix.from_coo(n, rows, cols, vals)


def diagonally_dominant(n: int, gen: np.random.Generator, density: float | None = None) -> SparseMatrix:
    """Random sparse, strictly row diagonally dominant matrix."""
    if density is None:
        density = min(1.0, 5.0 / n)
    mask = gen.random((n, n)) < density
    np.fill_diagonal(mask, False)
    r, c = np.nonzero(mask)
    v = gen.uniform(-1.0, 1.0, r.size)
    rowsum = np.zeros(n)
    np.add.at(rowsum, r, np.abs(v))
    d = rowsum * gen.uniform(1.2, 2.0, n) + gen.uniform(0.5, 1.5, n)
    i = np.arange(n)
    return SparseMatrix.from_coo(n, np.concatenate([r, i]), np.concatenate([c, i]), np.concatenate([v, d]))


def spd_laplacian_like(n: int, gen: np.random.Generator) -> SparseMatrix:
    """Random symmetric positive definite matrix (weighted path-graph Laplacian plus shift)."""
    w = gen.uniform(0.1, 1.0, n - 1)
    i = np.arange(n - 1)
    d = np.zeros(n)
    d[:-1] += w
    d[1:] += w
    d += gen.uniform(0.01, 0.5, n)
    rows = np.concatenate([i, i + 1, np.arange(n)])
    cols = np.concatenate([i + 1, i, np.arange(n)])
    vals = np.concatenate([-w, -w, d])
    return SparseMatrix.from_coo(n, rows, cols, vals)
