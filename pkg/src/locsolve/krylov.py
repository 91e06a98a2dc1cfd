"""Restarted GMRES with left preconditioning, plus Gauss-Seidel smoothing.

Convergence is always judged on the true residual ||b - A x||_2 against
tol * ||b||_2 (absolute tol when b = 0), so a converged outcome can be
re-verified with nothing but a matrix-vector product.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import _kernels
from .sparse import DimensionError, SparseMatrix, _check_vec, spmv


class ZeroDiagonalError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    """Non-finite arithmetic during an iterative solve."""


class Preconditioner(str, enum.Enum):
    NONE = "none"
    JACOBI = "jacobi"
    SGS = "sgs"

    @classmethod
    def parse(cls, kind) -> "Preconditioner":
        if isinstance(kind, cls):
            return kind
        aliases = {"symmetric-gauss-seidel": "sgs", "identity": "none", None: "none"}
        return cls(aliases.get(kind, kind))


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 80
    restart_dim: int = 40
    preconditioner: Preconditioner = Preconditioner.SGS

    def __post_init__(self):
        object.__setattr__(self, "preconditioner", Preconditioner.parse(self.preconditioner))
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.restart_dim < 1 or self.max_iterations < 1:
            raise ValueError("restart_dim and max_iterations must be >= 1")


@dataclass
class SolveOutcome:
    x: np.ndarray
    converged: bool
    iterations: int
    residual_history: list[float] = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]


def convergence_target(b: np.ndarray, tol: float) -> float:
    bnorm = float(np.linalg.norm(b))
    return tol * bnorm if bnorm > 0 else tol


def _nonzero_diagonal(A: SparseMatrix) -> np.ndarray:
    d = A.diagonal()
    bad = np.flatnonzero(d == 0)
    if bad.size:
        raise ZeroDiagonalError(f"zero diagonal entry at row {int(bad[0]) + 1}")
    return d


def make_preconditioner(kind, A: SparseMatrix):
    """Return a callable r -> M^{-1} r."""
    kind = Preconditioner.parse(kind)
    if kind is Preconditioner.NONE:
        return lambda r: np.array(r, dtype=np.float64)
    d = _nonzero_diagonal(A)
    if kind is Preconditioner.JACOBI:
        return lambda r: np.asarray(r, dtype=np.float64) / d
    indptr, indices, data = A.row_starts, A.col_indices, A.values
    return lambda r: _kernels.sgs_apply(indptr, indices, data, d, np.asarray(r, dtype=np.float64))


def apply_preconditioner(kind, A: SparseMatrix, r) -> np.ndarray:
    r = _check_vec(r, A.n, "residual")
    return make_preconditioner(kind, A)(r)


def gauss_seidel_sweeps(A: SparseMatrix, b, x, sweeps: int = 1) -> np.ndarray:
    b = _check_vec(b, A.n, "rhs")
    out = _check_vec(x, A.n, "iterate").copy()
    if sweeps < 0:
        raise ValueError("sweeps must be non-negative")
    d = _nonzero_diagonal(A)
    for _ in range(sweeps):
        _kernels.gs_forward(A.row_starts, A.col_indices, A.values, d, b, out)
    return out


def warm_up() -> None:
    """Compile (or load from cache) the sweep kernels so timed runs exclude JIT cost."""
    A = SparseMatrix.identity(2)
    gauss_seidel_sweeps(A, np.ones(2), np.zeros(2))
    apply_preconditioner(Preconditioner.SGS, A, np.ones(2))


def gmres_solve(A: SparseMatrix, b, x0=None, config: SolverConfig | None = None) -> SolveOutcome:
    config = config or SolverConfig()
    n = A.n
    b = _check_vec(b, n, "rhs")
    x = np.zeros(n) if x0 is None else _check_vec(x0, n, "initial iterate").copy()
    M = make_preconditioner(config.preconditioner, A)
    target = convergence_target(b, config.tolerance)

    r = b - spmv(A, x)
    rnorm = float(np.linalg.norm(r))
    if not (np.isfinite(rnorm) and np.isfinite(target)):
        raise DivergenceError("non-finite initial residual")
    history = [rnorm]
    iterations = 0
    converged = rnorm <= target
    while not converged and iterations < config.max_iterations:
        z = M(r)
        beta = float(np.linalg.norm(z))
        if not np.isfinite(beta):
            raise DivergenceError("non-finite preconditioned residual")
        if beta == 0.0:
            break
        m = min(config.restart_dim, config.max_iterations - iterations)
        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        V[0] = z / beta
        g[0] = beta
        x_cycle, r_cycle = x, r
        stalled = False
        for j in range(m):
            w = M(spmv(A, V[j]))
            # modified Gram-Schmidt, single pass
            for i in range(j + 1):
                H[i, j] = w @ V[i]
                w -= H[i, j] * V[i]
            h = float(np.linalg.norm(w))
            H[j + 1, j] = h
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            if not np.isfinite(denom):
                raise DivergenceError("non-finite Hessenberg entry")
            if denom == 0.0:
                stalled = j == 0
                break
            cs[j] = H[j, j] / denom
            sn[j] = H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            iterations += 1

            y = solve_triangular(H[: j + 1, : j + 1], g[: j + 1])
            x_cycle = x + V[: j + 1].T @ y
            r_cycle = b - spmv(A, x_cycle)
            rnorm = float(np.linalg.norm(r_cycle))
            if not np.isfinite(rnorm):
                raise DivergenceError("non-finite residual")
            history.append(rnorm)
            if rnorm <= target:
                converged = True
                break
            # happy breakdown: the Krylov space is invariant
            if h <= 1e-14 * beta:
                break
            V[j + 1] = w / h
        x, r = x_cycle, r_cycle
        if stalled:
            break
    return SolveOutcome(x=x, converged=bool(converged), iterations=iterations, residual_history=history)


__all__ = [
    "DimensionError",
    "DivergenceError",
    "Preconditioner",
    "SolveOutcome",
    "SolverConfig",
    "ZeroDiagonalError",
    "apply_preconditioner",
    "convergence_target",
    "gauss_seidel_sweeps",
    "gmres_solve",
    "make_preconditioner",
    "warm_up",
]
