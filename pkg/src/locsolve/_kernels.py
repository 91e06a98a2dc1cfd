"""Row-sequential CSR loops (Gauss-Seidel and triangular sweeps)."""
import numba
import numpy as np


@numba.njit(cache=True)
def gs_forward(indptr, indices, data, diag, b, x):
    """One forward Gauss-Seidel sweep, in place."""
    n = b.shape[0]
    for i in range(n):
        s = b[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i:
                s -= data[k] * x[j]
        x[i] = s / diag[i]


@numba.njit(cache=True)
def sgs_apply(indptr, indices, data, diag, r):
    """z = (D+U)^{-1} D (D+L)^{-1} r."""
    n = r.shape[0]
    y = np.empty(n)
    for i in range(n):
        s = r[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j < i:
                s -= data[k] * y[j]
        y[i] = s / diag[i]
    z = np.empty(n)
    for i in range(n - 1, -1, -1):
        s = diag[i] * y[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j > i:
                s -= data[k] * z[j]
        z[i] = s / diag[i]
    return z

