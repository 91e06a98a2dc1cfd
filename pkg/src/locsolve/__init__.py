"""Local character-based acceleration for sequences of sparse linear solves."""
from .domain import (
    DomainBuildTrace,
    GradientField,
    build_gradient_domain,
    build_residual_domain,
    compute_gradient,
    expand_domain,
    find_bad_points,
    neighbors,
)
from .krylov import (
    DivergenceError,
    Preconditioner,
    SolveOutcome,
    SolverConfig,
    ZeroDiagonalError,
    apply_preconditioner,
    gauss_seidel_sweeps,
    gmres_solve,
)
from .local import Method, MethodSelector, SolveReport, check_convergence, local_character_solve, solve_local_subsystem
from .mmio import MatrixMarketError, read_matrix_market, read_vector, write_matrix_market, write_vector
from .sparse import (
    DimensionError,
    LocalDomain,
    PartitionedSystem,
    Permutation,
    SparseMatrix,
    extract_partition,
    reassemble,
    residual,
    scatter_assemble,
    spmv,
)

__version__ = "0.1.0"
