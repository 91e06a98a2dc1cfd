import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locsolve import bench
from locsolve.heat import HeatConfig
from locsolve.krylov import SolverConfig
from locsolve.local import MethodSelector

records = st.builds(
    bench.BenchRecord,
    problem_id=st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=12),
    method=st.sampled_from(["method0", "method1", "method2"]),
    N=st.integers(1, 10**7),
    K=st.integers(0, 10**7),
    eta=st.floats(0, 1),
    cpu_total=st.floats(0, 1e4),
    cpu_domain=st.floats(0, 1e4),
    cpu_subsystem=st.floats(0, 1e4),
    cpu_global=st.floats(0, 1e4),
    iter_sub=st.integers(0, 10**5),
    iter_glb=st.integers(0, 10**5),
    converged_local=st.booleans(),
    speedup=st.none() | st.floats(1e-6, 1e6),
)


@given(st.lists(records, max_size=5))
def test_csv_roundtrip(recs):
    buf = io.StringIO()
    bench.write_csv(recs, buf)
    buf.seek(0)
    assert bench.read_csv(buf) == recs


def test_csv_header_exact():
    assert bench.to_csv_string([]).strip() == (
        "problem_id,method,N,K,eta,cpu_total,cpu_domain,cpu_subsystem,cpu_global,"
        "iter_sub,iter_glb,converged_local,speedup"
    )


def _rec(pid, method, t):
    return bench.BenchRecord(pid, method, 10, 2, 0.2, t, 0, 0, t, 0, 0, False)


def test_speedup_only_with_baseline():
    recs = [_rec("a", "method0", 2.0), _rec("a", "method1", 1.0), _rec("b", "method2", 1.0)]
    bench.fill_speedups(recs)
    assert recs[1].speedup == 2.0
    assert recs[2].speedup is None


def test_aggregate_keeps_eta_ratio():
    a = bench.aggregate("s", "method1", [_rec("x", "method1", 1.0), bench.BenchRecord("y", "method1", 10, 6, 0.6, 1, 0, 0, 1, 0, 0, True)])
    assert (a.N, a.K, a.eta) == (20, 8, 0.4)
    assert a.cpu_total == 2.0


def test_solve_methods_example(example):
    A, b, _, x0 = example
    recs, reps = bench.solve_methods(A, b, x0, ["0", "1", "2"], MethodSelector(alpha=0.5, e_max=6),
                                     SolverConfig(tolerance=1e-5), "ex")
    assert [r.method for r in recs] == ["method0", "method1", "method2"]
    assert [r.K for r in recs] == [0, 2, 6]
    for r in recs:
        assert r.eta == r.K / r.N
        assert r.cpu_total >= 0.95 * (r.cpu_domain + r.cpu_subsystem)


def test_heat_sweeps_are_monotone():
    prob = bench.heat_problem(HeatConfig(nx=15, ny=15))
    alphas = [10.0**-k for k in range(12)]
    recs, pre = bench.sweep(prob, "alpha", alphas, MethodSelector(), SolverConfig(), "h")
    etas = [r.eta for r in recs[1:]]
    assert recs[1].K == 0
    assert all(a <= b for a, b in zip(etas, etas[1:]))
    recs, pre = bench.sweep(prob, "emax", range(7), MethodSelector(), SolverConfig(), "h")
    Ks = [r.K for r in recs[1:]]
    assert all(a <= b for a, b in zip(Ks, Ks[1:]))
    assert [p[1] for p in pre[1:]] == [str(i) for i in range(7)]


def test_sweep_rejects_bad_values():
    prob = bench.heat_problem(HeatConfig(nx=4, ny=4))
    with pytest.raises(ValueError):
        bench.sweep(prob, "emax", [1.5], MethodSelector(), SolverConfig(), "h")
    with pytest.raises(ValueError):
        bench.sweep(prob, "alpha", [], MethodSelector(), SolverConfig(), "h")


def test_relative_l2():
    assert bench.relative_l2(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == 1.0
