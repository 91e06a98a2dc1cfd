"""Matrix Market and plain-text I/O for matrices and vectors."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sps

from .sparse import SparseMatrix


class MatrixMarketError(ValueError):
    pass


def _header(path) -> list[str]:
    with open(path) as fh:
        first = fh.readline()
    tokens = first.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise MatrixMarketError(f"{path}: malformed Matrix Market header {first.strip()!r}")
    return tokens


def read_matrix_market(path) -> SparseMatrix:
    """Read a real coordinate file (general or symmetric). Symmetric storage is
    expanded to the full pattern, duplicate coordinates are summed."""
    _, _, fmt, field, symmetry = _header(path)
    if fmt != "coordinate":
        raise MatrixMarketError(f"{path}: expected coordinate format, got {fmt}")
    if field not in ("real", "integer"):
        raise MatrixMarketError(f"{path}: unsupported field {field}")
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(f"{path}: unsupported symmetry {symmetry}")
    try:
        coo = scipy.io.mmread(path)
    except (ValueError, IndexError) as exc:
        raise MatrixMarketError(f"{path}: {exc}") from exc
    coo = sps.coo_matrix(coo)
    if coo.shape[0] != coo.shape[1]:
        raise MatrixMarketError(f"{path}: matrix is {coo.shape[0]}x{coo.shape[1]}, not square")
    if not np.all(np.isfinite(coo.data)):
        raise MatrixMarketError(f"{path}: non-finite value")
    return SparseMatrix.from_coo(coo.shape[0], coo.row, coo.col, coo.data)


def write_matrix_market(A: SparseMatrix, path, comment: str = "") -> None:
    rows = A.row_ids()
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {A.nnz}\n")
        for i, j, v in zip(rows, A.col_indices, A.values):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def read_vector(path, n: int | None = None) -> np.ndarray:
    """Matrix Market array vector, or one value per line."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline()
    if first.lower().startswith("%%matrixmarket"):
        _, _, fmt, field, _ = _header(path)
        if fmt != "array" or field not in ("real", "integer"):
            raise MatrixMarketError(f"{path}: vectors must be real array format")
        v = np.asarray(scipy.io.mmread(path), dtype=np.float64)
        if v.ndim == 2 and 1 not in v.shape:
            raise MatrixMarketError(f"{path}: expected a single column")
        v = v.ravel()
    else:
        try:
            v = np.loadtxt(path, dtype=np.float64, ndmin=1, comments="%")
        except ValueError as exc:
            raise MatrixMarketError(f"{path}: {exc}") from exc
        if v.ndim != 1:
            raise MatrixMarketError(f"{path}: expected one value per line")
    if not np.all(np.isfinite(v)):
        raise MatrixMarketError(f"{path}: non-finite value")
    if n is not None and v.size != n:
        raise MatrixMarketError(f"{path}: vector has {v.size} entries, expected {n}")
    return v


def write_vector(v, path, fmt: str = "mm") -> None:
    v = np.asarray(v, dtype=np.float64).ravel()
    with open(path, "w") as fh:
        if fmt == "mm":
            fh.write("%%MatrixMarket matrix array real general\n")
            fh.write(f"{v.size} 1\n")
        for x in v:
            fh.write(f"{x:.17g}\n")


def write_grid(field, nx: int, ny: int, path) -> None:
    """One line per y-row of the grid, values along x."""
    grid = np.asarray(field, dtype=np.float64).reshape(ny, nx)
    with open(path, "w") as fh:
        for row in grid:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_grid(path) -> np.ndarray:
    return np.loadtxt(path, ndmin=2)
