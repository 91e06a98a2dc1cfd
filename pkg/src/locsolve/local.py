"""Local character-based solve: localize, solve the subsystem, assemble,
smooth, check, and fall back to a global solve when needed."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .domain import (
    DomainBuildTrace,
    build_gradient_domain,
    build_residual_domain,
    check_relative_variation,
)
from .krylov import SolveOutcome, SolverConfig, convergence_target, gauss_seidel_sweeps, gmres_solve
from .sparse import LocalDomain, PartitionedSystem, SparseMatrix, _check_vec, extract_partition, residual, scatter_assemble


class Method(str, enum.Enum):
    BASELINE = "baseline"
    GRADIENT = "gradient"
    RESIDUAL = "residual"

    @property
    def tag(self) -> str:
        return f"method{list(Method).index(self)}"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        s = str(value).strip().lower()
        aliases = {
            "0": "baseline", "method0": "baseline",
            "1": "gradient", "method1": "gradient", "gradient-local": "gradient",
            "2": "residual", "method2": "residual", "residual-local": "residual",
        }
        return cls(aliases.get(s, s))


@dataclass(frozen=True)
class MethodSelector:
    kind: Method = Method.BASELINE
    alpha: float = 1e-4
    e_max: int = 1
    smoothing_sweeps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Method.parse(self.kind))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.e_max < 0 or self.smoothing_sweeps < 0:
            raise ValueError("E_max and smoothing_sweeps must be non-negative")


@dataclass
class Timings:
    domain_construction: float = 0.0
    subsystem_solve: float = 0.0
    smoothing: float = 0.0
    global_solve: float = 0.0
    total: float = 0.0


@dataclass
class SolveReport:
    method: MethodSelector
    N: int
    K: int
    x: np.ndarray
    converged: bool
    converged_after_local: bool = False
    domain: LocalDomain | None = None
    trace: DomainBuildTrace | None = None
    subsystem_outcome: SolveOutcome | None = None
    global_outcome: SolveOutcome | None = None
    x_assembled: np.ndarray | None = field(default=None, repr=False)
    timings: Timings = field(default_factory=Timings)

    @property
    def eta(self) -> float:
        return self.K / self.N if self.N else 0.0

    @property
    def iterations_subsystem(self) -> int:
        return self.subsystem_outcome.iterations if self.subsystem_outcome else 0

    @property
    def iterations_global(self) -> int:
        return self.global_outcome.iterations if self.global_outcome else 0


def check_convergence(A: SparseMatrix, b, x, eps: float) -> bool:
    b = _check_vec(b, A.n, "rhs")
    return float(np.linalg.norm(residual(A, b, x))) <= convergence_target(b, eps)


def solve_local_subsystem(part: PartitionedSystem, config: SolverConfig) -> SolveOutcome:
    """Solve B x_B = b_B - E x_C0 starting from x_B0."""
    if part.K < 1:
        raise ValueError("empty subsystem")
    rhs = part.b_B - part.E @ part.x_C0
    return gmres_solve(part.B, rhs, part.x_B0, config)


def build_domain(A, b, x0, selector: MethodSelector, eps: float):
    if selector.kind is Method.GRADIENT:
        domain, _ = build_gradient_domain(A, x0, selector.alpha)
        return domain, None
    if selector.kind is Method.RESIDUAL:
        return build_residual_domain(A, b, x0, eps, selector.e_max)
    raise ValueError("baseline has no local domain")


def local_character_solve(
    A: SparseMatrix,
    b,
    x0,
    selector: MethodSelector | None = None,
    config: SolverConfig | None = None,
) -> SolveReport:
    selector = selector or MethodSelector()
    config = config or SolverConfig()
    b = _check_vec(b, A.n, "rhs")
    x0 = _check_vec(x0, A.n, "initial iterate")
    clock = time.process_time
    timings = Timings()
    t_start = clock()

    if selector.kind is Method.BASELINE:
        out = gmres_solve(A, b, x0, config)
        timings.global_solve = timings.total = clock() - t_start
        return SolveReport(
            method=selector, N=A.n, K=0, x=out.x, converged=out.converged,
            global_outcome=out, timings=timings,
        )

    t = clock()
    domain, trace = build_domain(A, b, x0, selector, config.tolerance)
    timings.domain_construction = clock() - t

    sub = None
    x_tilde = x0.copy()
    if domain.K > 0:
        t = clock()
        part = extract_partition(A, b, x0, domain)
        # non-convergence here is tolerated; the global phase covers it
        sub = solve_local_subsystem(part, config)
        x_tilde = scatter_assemble(domain, sub.x, part.x_C0)
        timings.subsystem_solve = clock() - t
        check_relative_variation(domain, x0, sub.x)
    x_assembled = x_tilde.copy()

    t = clock()
    if selector.smoothing_sweeps:
        x_tilde = gauss_seidel_sweeps(A, b, x_tilde, selector.smoothing_sweeps)
    timings.smoothing = clock() - t

    report = SolveReport(
        method=selector, N=A.n, K=domain.K, x=x_tilde, converged=False,
        domain=domain, trace=trace, subsystem_outcome=sub, x_assembled=x_assembled,
        timings=timings,
    )
    if check_convergence(A, b, x_tilde, config.tolerance):
        report.converged = report.converged_after_local = True
    else:
        t = clock()
        out = gmres_solve(A, b, x_tilde, config)
        timings.global_solve = clock() - t
        report.global_outcome = out
        report.x = out.x
        report.converged = out.converged
    timings.total = clock() - t_start
    return report
