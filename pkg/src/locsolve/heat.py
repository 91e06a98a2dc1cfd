"""2D nonlinear heat conduction, T_t = div(kappa(T) grad T) on the unit square.

Backward Euler in time, five-point differences in space, Picard
linearization with kappa frozen at the previous nonlinear iterate.
Dirichlet temperatures at x = 0 and x = 1, zero flux at y = 0 and y = 1.

Unknowns are the Nx*Ny interior nodes x_p = p*h_x, y_q = q*h_y
(p = 1..Nx, q = 1..Ny, h = 1/(N+1)), stored row-major with one row per
y-line: index = (q-1)*Nx + (p-1).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .krylov import SolverConfig
from .local import MethodSelector, SolveReport, local_character_solve
from .sparse import SparseMatrix

log = logging.getLogger(__name__)


class NonPositiveTemperature(ValueError):
    pass


@dataclass(frozen=True)
class HeatConfig:
    nx: int = 99
    ny: int = 99
    dt: float = 1e-2
    n_steps: int = 100
    t_left: float = 1.0
    t_right: float = 1e-4
    kappa_exponent: float = 3.5
    linear_eps: float = 1e-10
    nonlinear_tol: float = 1e-8
    max_picard: int = 100
    selector: MethodSelector = field(default_factory=MethodSelector)
    restart_dim: int = 40
    max_iterations: int = 80
    preconditioner: str = "sgs"

    def __post_init__(self):
        # ny = 1 is allowed: it degenerates to a 1D chain
        if self.nx < 2 or self.ny < 1:
            raise ValueError("need nx >= 2 and ny >= 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if not (self.t_left > 0 and self.t_right > 0):
            raise ValueError("boundary temperatures must be positive")
        if not (self.linear_eps > 0 and self.nonlinear_tol > 0):
            raise ValueError("tolerances must be positive")

    @property
    def n(self) -> int:
        return self.nx * self.ny

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx + 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny + 1)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tolerance=self.linear_eps,
            max_iterations=self.max_iterations,
            restart_dim=self.restart_dim,
            preconditioner=self.preconditioner,
        )


@dataclass
class LinearProblem:
    A: SparseMatrix
    b: np.ndarray
    x0: np.ndarray
    eps: float


def node_x(config: HeatConfig) -> np.ndarray:
    """x coordinate of every unknown, in storage order."""
    xs = np.arange(1, config.nx + 1) * config.hx
    return np.tile(xs, config.ny)


def initial_field(config: HeatConfig) -> np.ndarray:
    return np.exp(-100.0 * node_x(config)) * config.t_left + config.t_right


def kappa(T, exponent: float) -> np.ndarray:
    T = np.asarray(T, dtype=np.float64)
    if np.any(~(T > 0)):
        bad = int(np.flatnonzero(~(T > 0))[0])
        raise NonPositiveTemperature(f"temperature {T.flat[bad]!r} at node {bad + 1} is not positive")
    return T**exponent


def assemble_picard_system(T_prev_time, T_prev_iter, config: HeatConfig) -> LinearProblem:
    """Linear system for T^{n+1,s+1} with kappa evaluated at T^{n+1,s}.

    Row (p,q): (1/dt + sum_f k_f/h_f^2) T_pq - sum_f k_f/h_f^2 T_nb = T^n_pq/dt
    (+ k_f/h^2 * T_boundary on Dirichlet faces). Face conductivities are the
    arithmetic mean of the two adjacent nodal values (boundary faces use the
    boundary temperature).
    """
    nx, ny = config.nx, config.ny
    T_prev_time = np.asarray(T_prev_time, dtype=np.float64)
    T_prev_iter = np.asarray(T_prev_iter, dtype=np.float64)
    if T_prev_time.shape != (nx * ny,) or T_prev_iter.shape != (nx * ny,):
        raise ValueError("field size does not match the grid")
    kap = kappa(T_prev_iter, config.kappa_exponent).reshape(ny, nx)
    kl, kr = kappa(np.array([config.t_left, config.t_right]), config.kappa_exponent)
    hx2, hy2 = config.hx**2, config.hy**2
    idx = np.arange(nx * ny).reshape(ny, nx)

    # face coefficients per node and direction; zero on the no-flux y faces
    kx = 0.5 * (kap[:, :-1] + kap[:, 1:]) / hx2
    k_w = np.empty((ny, nx))
    k_e = np.empty((ny, nx))
    k_w[:, 1:] = kx
    k_e[:, :-1] = kx
    k_w[:, 0] = 0.5 * (kap[:, 0] + kl) / hx2
    k_e[:, -1] = 0.5 * (kap[:, -1] + kr) / hx2
    k_s = np.zeros((ny, nx))
    k_n = np.zeros((ny, nx))
    ky = 0.5 * (kap[:-1, :] + kap[1:, :]) / hy2
    k_s[1:, :] = ky
    k_n[:-1, :] = ky

    # fixed W, E, S, N accumulation order
    diag = 1.0 / config.dt + k_w + k_e + k_s + k_n
    rhs = T_prev_time.reshape(ny, nx) / config.dt
    rhs[:, 0] += k_w[:, 0] * config.t_left
    rhs[:, -1] += k_e[:, -1] * config.t_right

    rows = [idx.ravel(), idx[:, 1:].ravel(), idx[:, :-1].ravel(), idx[1:, :].ravel(), idx[:-1, :].ravel()]
    cols = [idx.ravel(), idx[:, :-1].ravel(), idx[:, 1:].ravel(), idx[:-1, :].ravel(), idx[1:, :].ravel()]
    vals = [diag.ravel(), -k_w[:, 1:].ravel(), -k_e[:, :-1].ravel(), -k_s[1:, :].ravel(), -k_n[:-1, :].ravel()]
    A = SparseMatrix.from_coo(nx * ny, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
    return LinearProblem(A=A, b=rhs.ravel().copy(), x0=T_prev_iter.copy(), eps=config.linear_eps)


@dataclass
class StepResult:
    step: int
    field: np.ndarray
    reports: list[SolveReport]
    picard_iterations: int
    converged: bool
    increments: list[float] = field(default_factory=list)

    @property
    def mean_eta(self) -> float:
        return float(np.mean([r.eta for r in self.reports])) if self.reports else 0.0

    @property
    def n_solves(self) -> int:
        return len(self.reports)


def _drop_vectors(rep: SolveReport) -> None:
    # long runs keep thousands of reports; only the metrics are needed
    rep.x = rep.x_assembled = None
    for out in (rep.subsystem_outcome, rep.global_outcome):
        if out is not None:
            out.x = None


def picard_step(T_prev_time, config: HeatConfig, step: int = 1, on_system=None) -> StepResult:
    """Advance one time step. ``on_system(problem, report)`` sees every linear solve."""
    T_prev_time = np.asarray(T_prev_time, dtype=np.float64)
    solver = config.solver_config()
    T_iter = T_prev_time.copy()
    reports: list[SolveReport] = []
    increments: list[float] = []
    converged = False
    for s in range(config.max_picard):
        prob = assemble_picard_system(T_prev_time, T_iter, config)
        rep = local_character_solve(prob.A, prob.b, prob.x0, config.selector, solver)
        if not rep.converged:
            log.warning("step %d picard %d: linear solve did not converge", step, s)
        reports.append(rep)
        if on_system is not None:
            on_system(prob, rep)
        T_new = rep.x
        if not np.all(np.isfinite(T_new)) or np.any(T_new <= 0):
            raise NonPositiveTemperature(f"step {step} picard {s}: non-positive or non-finite temperature")
        inc = float(np.linalg.norm(T_new - T_iter))
        increments.append(inc)
        T_iter = T_new
        _drop_vectors(rep)
        if inc < config.nonlinear_tol:
            converged = True
            break
    if not converged:
        log.warning("step %d: Picard did not converge in %d iterations", step, config.max_picard)
    return StepResult(step, T_iter, reports, len(reports), converged, increments)


def run_simulation(config: HeatConfig, on_step=None, on_system=None) -> tuple[np.ndarray, list[StepResult]]:
    T = initial_field(config)
    steps: list[StepResult] = []
    for n in range(1, config.n_steps + 1):
        res = picard_step(T, config, step=n, on_system=on_system)
        steps.append(res)
        T = res.field
        log.info("step %d: %d picard iterations, mean eta %.4f", n, res.picard_iterations, res.mean_eta)
        if on_step is not None:
            on_step(res)
    return T, steps
