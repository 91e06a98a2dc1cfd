import numpy as np
import pytest

from locsolve.krylov import SolverConfig, gmres_solve
from locsolve.local import Method, MethodSelector, check_convergence, local_character_solve, solve_local_subsystem
from locsolve.problems import banded, diagonally_dominant
from locsolve.sparse import LocalDomain, SparseMatrix, extract_partition, residual, spmv

from .oracles import example_exact, exact_residual


def test_method_parsing():
    assert Method.parse("1") is Method.GRADIENT
    assert Method.parse("method2") is Method.RESIDUAL
    assert Method.RESIDUAL.tag == "method2"
    with pytest.raises(ValueError):
        MethodSelector(alpha=2.0)


def test_check_convergence(example):
    A, b, x, x0 = example
    assert check_convergence(A, b, x, 1e-12)
    assert not check_convergence(A, b, np.zeros(9), 0.5)
    Ae, be, x0e = example_exact()
    r_exact = sum(float(v) ** 2 for v in exact_residual(Ae, be, x0e)) ** 0.5
    assert np.linalg.norm(residual(A, b, x0)) == pytest.approx(r_exact, rel=1e-12)
    assert not check_convergence(A, b, x0, 1e-5)


def test_subsystem_full_domain_matches_global(example):
    A, b, _, x0 = example
    c = SolverConfig(tolerance=1e-10)
    part = extract_partition(A, b, x0, LocalDomain.full(9))
    assert np.array_equal(solve_local_subsystem(part, c).x, gmres_solve(A, b, x0, c).x)


def test_subsystem_annihilates_local_residual(example):
    A, b, _, x0 = example
    dom = LocalDomain.from_any(range(6), 9)
    part = extract_partition(A, b, x0, dom)
    out = solve_local_subsystem(part, SolverConfig(tolerance=1e-13))
    x_tilde = x0.copy()
    x_tilde[:6] = out.x
    r = residual(A, b, x_tilde)
    assert np.max(np.abs(r[:6])) < 1e-13


def test_subsystem_diagonal_one_iteration(gen):
    d = gen.uniform(1, 3, 8)
    A = SparseMatrix.from_dense(np.diag(d))
    b = gen.normal(size=8)
    part = extract_partition(A, b, np.zeros(8), LocalDomain.from_any([1, 4, 6], 8))
    out = solve_local_subsystem(part, SolverConfig(preconditioner="jacobi"))
    assert out.iterations == 1
    np.testing.assert_allclose(out.x, b[[1, 4, 6]] / d[[1, 4, 6]], rtol=1e-15)


def test_already_converged_skips_local_phase(example):
    A, b, x, _ = example
    rep = local_character_solve(A, b, x, MethodSelector("residual"), SolverConfig(tolerance=1e-5))
    assert rep.K == 0 and rep.converged_after_local and rep.global_outcome is None


def test_example_residual_method(example):
    A, b, _, x0 = example
    rep = local_character_solve(A, b, x0, MethodSelector("residual", e_max=6, smoothing_sweeps=1), SolverConfig(tolerance=1e-5))
    assert rep.K == 6 and rep.eta == 6 / 9
    assert rep.converged
    assert np.linalg.norm(residual(A, b, rep.x)) <= 1e-5 * np.linalg.norm(b)


def test_baseline_is_plain_gmres(gen):
    A = diagonally_dominant(60, gen)
    b, x0 = gen.normal(size=60), gen.normal(size=60)
    c = SolverConfig(restart_dim=7)
    rep = local_character_solve(A, b, x0, MethodSelector("baseline"), c)
    direct = gmres_solve(A, b, x0, c)
    assert np.array_equal(rep.x, direct.x)
    assert rep.global_outcome.residual_history == direct.residual_history


@pytest.mark.parametrize("kind", ["gradient", "residual"])
def test_local_properties_random(gen, kind):
    for _ in range(10):
        n = int(gen.integers(10, 120))
        A = banded(n, int(gen.integers(1, 4)), gen)
        x = gen.normal(size=n)
        b = spmv(A, x)
        x0 = x.copy()
        hot = gen.random(n) < 0.15
        x0[hot] += gen.normal(size=hot.sum())
        c = SolverConfig(tolerance=1e-10)
        rep = local_character_solve(A, b, x0, MethodSelector(kind, alpha=0.1, e_max=2), c)
        assert rep.converged and check_convergence(A, b, rep.x, 1e-10)
        if rep.K:
            inside = rep.domain.mask()
            assert np.array_equal(rep.x_assembled[~inside], x0[~inside])
            sub_rhs = b[inside] - (A.to_dense()[np.ix_(inside, ~inside)] @ x0[~inside])
            r_loc = residual(A, b, rep.x_assembled)[inside]
            assert np.linalg.norm(r_loc) <= 1e-10 * np.linalg.norm(sub_rhs) * (1 + 1e-8)


def test_empty_domain_still_solves(gen):
    A = banded(30, 1, gen)
    b = gen.normal(size=30)
    rep = local_character_solve(A, b, np.ones(30), MethodSelector("gradient", alpha=0.5), SolverConfig())
    assert rep.K == 0 and rep.converged and rep.subsystem_outcome is None


def test_timings_consistent(gen):
    A = banded(400, 2, gen)
    x = gen.normal(size=400)
    x0 = x + (np.arange(400) < 40) * 1.0
    rep = local_character_solve(A, spmv(A, x), x0, MethodSelector("residual", e_max=2), SolverConfig())
    t = rep.timings
    assert t.total >= (t.domain_construction + t.subsystem_solve) * 0.95
