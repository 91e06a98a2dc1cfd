"""Local domain construction.

Two strategies pick the components expected to move between the initial
iterate and the converged solution:

* gradient: an l1-style gradient of the initial iterate over the matrix
  adjacency graph, thresholded at ``alpha * max(g)``;
* residual: components whose initial residual exceeds
  ``eps * ||b||_2 / sqrt(N)``, grown outward by a bounded number of neighbour
  rounds using the residual-plus-coupling bound.

All comparisons are strict.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .sparse import DimensionError, LocalDomain, SparseMatrix, _check_vec, residual

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradientField:
    g: np.ndarray

    @property
    def g_max(self) -> float:
        return float(self.g.max()) if self.g.size else 0.0


@dataclass
class ExpansionRound:
    m: int
    neighbors: list[int]
    admitted: list[int]
    K: int
    # admission value |r_j| + sum_l |a_{j,i_l} x_{i_l}| per neighbour j
    values: dict[int, float]


@dataclass
class DomainBuildTrace:
    threshold: float
    initial_residual: np.ndarray
    initial_bad_points: list[int]
    rounds: list[ExpansionRound] = field(default_factory=list)

    def table(self) -> str:
        """Human-readable expansion table, 1-based indices."""
        lines = [
            f"threshold eps*||b||_2/sqrt(N) = {self.threshold:.3e}",
            f"initial bad points: {_fmt_set(self.initial_bad_points)}  K = {len(self.initial_bad_points)}",
            f"{'m':>3}  {'neighbors':<24} {'admitted':<24} {'omega_local':<32} {'K':>6}  admission values",
        ]
        omega = sorted(self.initial_bad_points)
        for rd in self.rounds:
            omega = sorted(set(omega) | set(rd.admitted))
            vals = ", ".join(f"{j + 1}: {v:.3e}" for j, v in sorted(rd.values.items()))
            lines.append(
                f"{rd.m:>3}  {_fmt_set(rd.neighbors):<24} {_fmt_set(rd.admitted):<24} "
                f"{_fmt_set(omega):<32} {rd.K:>6}  {vals}"
            )
        return "\n".join(lines)


def _fmt_set(idx, limit: int = 8) -> str:
    idx = [int(i) + 1 for i in idx]
    if not idx:
        return "{}"
    if len(idx) > limit:
        return "{" + ", ".join(map(str, idx[:limit])) + f", ... ({len(idx)})" + "}"
    return "{" + ", ".join(map(str, idx)) + "}"


def compute_gradient(A: SparseMatrix, x0) -> GradientField:
    x0 = _check_vec(x0, A.n, "initial iterate")
    rows = A.row_ids()
    # the diagonal term |x_i - x_i| is zero, so no need to mask it
    terms = np.abs(x0[rows] - x0[A.col_indices])
    g = np.zeros(A.n)
    np.add.at(g, rows, terms)
    return GradientField(g)


def build_gradient_domain(A: SparseMatrix, x0, alpha: float) -> tuple[LocalDomain, GradientField]:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    grad = compute_gradient(A, x0)
    if alpha == 0.0:
        return LocalDomain.full(A.n), grad
    idx = np.flatnonzero(grad.g > alpha * grad.g_max)
    return LocalDomain(idx, A.n), grad


def bad_point_threshold(b: np.ndarray, eps: float) -> float:
    n = b.size
    return eps * float(np.linalg.norm(b)) / np.sqrt(n) if n else 0.0


def find_bad_points(A: SparseMatrix, b, x0, eps: float) -> tuple[LocalDomain, DomainBuildTrace]:
    if not eps > 0:
        raise ValueError("eps must be positive")
    b = _check_vec(b, A.n, "rhs")
    r0 = residual(A, b, x0)
    tau = bad_point_threshold(b, eps)
    idx = np.flatnonzero(np.abs(r0) > tau)
    trace = DomainBuildTrace(threshold=tau, initial_residual=r0, initial_bad_points=idx.tolist())
    return LocalDomain(idx, A.n), trace


def neighbors(A: SparseMatrix, domain: LocalDomain) -> np.ndarray:
    """Rows outside the domain that store an entry in some domain column."""
    inside = domain.mask()
    rows = A.row_ids()
    hit = inside[A.col_indices] & ~inside[rows]
    return np.unique(rows[hit])


def expand_domain(
    A: SparseMatrix, b, x0, domain: LocalDomain, trace: DomainBuildTrace, e_max: int
) -> tuple[LocalDomain, DomainBuildTrace]:
    if e_max < 0:
        raise ValueError("E_max must be non-negative")
    x0 = _check_vec(x0, A.n, "initial iterate")
    r0 = trace.initial_residual
    tau = trace.threshold
    inside = domain.mask()
    rows = A.row_ids()
    coupling = np.abs(A.values * x0[A.col_indices])
    for m in range(1, e_max + 1):
        # row j sums |a_{j,i} x_i| over columns i currently in the domain
        in_cols = inside[A.col_indices]
        nbr_hit = in_cols & ~inside[rows]
        nbrs = np.unique(rows[nbr_hit])
        if nbrs.size == 0:
            break
        acc = np.zeros(A.n)
        np.add.at(acc, rows[nbr_hit], coupling[nbr_hit])
        values = np.abs(r0[nbrs]) + acc[nbrs]
        admitted = nbrs[values > tau]
        inside[admitted] = True
        trace.rounds.append(
            ExpansionRound(
                m=m,
                neighbors=nbrs.tolist(),
                admitted=admitted.tolist(),
                K=int(inside.sum()),
                values=dict(zip(nbrs.tolist(), values.tolist())),
            )
        )
        if admitted.size == 0:
            break
    return LocalDomain(np.flatnonzero(inside), A.n), trace


def build_residual_domain(A: SparseMatrix, b, x0, eps: float, e_max: int) -> tuple[LocalDomain, DomainBuildTrace]:
    domain, trace = find_bad_points(A, b, x0, eps)
    return expand_domain(A, b, x0, domain, trace, e_max)


def check_relative_variation(domain: LocalDomain, x0, x_local) -> int:
    """Count domain components whose change exceeds |x0|; the expansion bound
    assumes there are none."""
    x0 = np.asarray(x0)[domain.indices]
    bad = int(np.count_nonzero(np.abs(np.asarray(x_local) - x0) > np.abs(x0)))
    if bad:
        log.info("relative variation above one at %d of %d local components", bad, domain.K)
    return bad


__all__ = [
    "DimensionError",
    "DomainBuildTrace",
    "ExpansionRound",
    "GradientField",
    "LocalDomain",
    "bad_point_threshold",
    "build_gradient_domain",
    "build_residual_domain",
    "check_relative_variation",
    "compute_gradient",
    "expand_domain",
    "find_bad_points",
    "neighbors",
]
