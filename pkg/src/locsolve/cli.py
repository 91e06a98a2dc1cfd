"""Command-line entry point: ``locsolve solve|heat|sweep``.

Exit codes: 0 when every requested solve converged, 1 on non-convergence,
2 on input errors (unreadable files, dimension mismatch, zero diagonal
under a diagonal-based preconditioner).
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, mmio
from .heat import HeatConfig, LinearProblem, NonPositiveTemperature, initial_field
from .krylov import DivergenceError, SolverConfig, ZeroDiagonalError, warm_up
from .local import Method, MethodSelector
from .sparse import DimensionError

log = logging.getLogger("locsolve")

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_INPUT = 0, 1, 2


def _methods(text: str) -> list[Method]:
    return [Method.parse(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=1e-10, help="relative residual tolerance")
    p.add_argument("--restart", type=int, default=40, help="Krylov dimension")
    p.add_argument("--maxiter", type=int, default=80, help="GMRES iteration cap")
    p.add_argument("--precond", default="sgs", choices=["none", "jacobi", "sgs"])
    p.add_argument("--alpha", type=float, default=1e-4, help="gradient threshold fraction (method 1)")
    p.add_argument("--emax", type=int, default=1, help="expansion rounds (method 2)")
    p.add_argument("--smooth", type=int, default=1, help="Gauss-Seidel sweeps after assembly")
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_system_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", "-A", help="Matrix Market coordinate file")
    p.add_argument("--rhs", "-b", help="right-hand side vector file (default: A @ ones)")
    p.add_argument("--x0", help="initial iterate file (default: zeros)")
    p.add_argument("--problem-id", help="label for CSV rows (default: matrix file stem)")


def _add_heat_flags(p: argparse.ArgumentParser, prefix: str = "") -> None:
    p.add_argument(f"--{prefix}nx", type=int, default=99)
    p.add_argument(f"--{prefix}ny", type=int, default=99)
    p.add_argument(f"--{prefix}dt", type=float, default=1e-2)
    p.add_argument(f"--{prefix}tl", type=float, default=1.0, help="temperature at x = 0")
    p.add_argument(f"--{prefix}tr", type=float, default=1e-4, help="temperature at x = 1")
    p.add_argument(f"--{prefix}kappa-exp", type=float, default=3.5)
    p.add_argument(f"--{prefix}nonlinear-tol", type=float, default=1e-8)
    p.add_argument(f"--{prefix}max-picard", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locsolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    ps = sub.add_parser("solve", help="solve one system from files with the selected methods")
    _add_system_flags(ps)
    ps.add_argument("--methods", "--method", dest="methods", default="0",
                    help="comma list of 0/1/2 or baseline/gradient/residual")
    ps.add_argument("--trace", action="store_true", help="write the domain expansion trace")
    ps.add_argument("--trace-out", help="trace destination (default stderr)")
    _add_solver_flags(ps)

    ph = sub.add_parser("heat", help="run the 2D nonlinear heat-conduction experiment")
    _add_heat_flags(ph)
    ph.add_argument("--steps", type=int, default=100)
    ph.add_argument("--methods", default="0,1,2")
    ph.add_argument("--snapshot-every", type=int, default=0, help="dump the field every k steps")
    ph.add_argument("--snapshot-dir", help="directory for field dumps (step 0 is always written)")
    _add_solver_flags(ph)

    pw = sub.add_parser("sweep", help="sweep alpha or E_max on one system")
    pw.add_argument("--param", required=True, choices=["alpha", "emax"])
    pw.add_argument("--values", help="comma list (default: 1..1e-11 for alpha, 0..6 for emax)")
    _add_system_flags(pw)
    _add_heat_flags(pw, prefix="heat-")
    pw.add_argument("--heat-advance", type=int, default=0,
                    help="time steps to advance before taking the heat system (when no --matrix)")
    _add_solver_flags(pw)
    return parser


def _solver_config(args) -> SolverConfig:
    return SolverConfig(tolerance=args.eps, max_iterations=args.maxiter, restart_dim=args.restart,
                        preconditioner=args.precond)


def _selector(args) -> MethodSelector:
    return MethodSelector(alpha=args.alpha, e_max=args.emax, smoothing_sweeps=args.smooth)


@contextlib.contextmanager
def _open_out(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _load_system(args) -> LinearProblem:
    A = mmio.read_matrix_market(args.matrix)
    b = mmio.read_vector(args.rhs, A.n) if args.rhs else A @ np.ones(A.n)
    x0 = mmio.read_vector(args.x0, A.n) if args.x0 else np.zeros(A.n)
    return LinearProblem(A=A, b=b, x0=x0, eps=args.eps)


def _write_trace(text: str, path) -> None:
    if path:
        with open(path, "a") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)


def cmd_solve(args) -> int:
    if not args.matrix:
        raise ValueError("--matrix is required")
    prob = _load_system(args)
    pid = args.problem_id or Path(args.matrix).stem
    config = _solver_config(args)
    records, reports = bench.solve_methods(prob.A, prob.b, prob.x0, _methods(args.methods),
                                           _selector(args), config, pid)
    if args.trace:
        for rep in reports:
            head = f"# {pid} {rep.method.kind.tag}: N = {rep.N}, K = {rep.K}, eta = {rep.eta:.4f}"
            body = rep.trace.table() if rep.trace is not None else ""
            _write_trace("\n".join(filter(None, [head, body])), args.trace_out)
    with _open_out(args.out) as fh:
        bench.write_csv(records, fh)
    return EXIT_OK if all(r.converged for r in records) else EXIT_NOT_CONVERGED


def _heat_config(args, prefix: str = "", steps: int = 0, eps: float = 1e-10) -> HeatConfig:
    g = lambda name: getattr(args, prefix + name)  # noqa: E731
    return HeatConfig(
        nx=g("nx"), ny=g("ny"), dt=g("dt"), n_steps=steps, t_left=g("tl"), t_right=g("tr"),
        kappa_exponent=g("kappa_exp"), linear_eps=eps, nonlinear_tol=g("nonlinear_tol"),
        max_picard=g("max_picard"), selector=_selector(args), restart_dim=args.restart,
        max_iterations=args.maxiter, preconditioner=args.precond,
    )


def cmd_heat(args) -> int:
    config = _heat_config(args, steps=args.steps, eps=args.eps)
    snap_dir = Path(args.snapshot_dir) if args.snapshot_dir else None
    methods = _methods(args.methods)

    def dump(tag: str, step: int, field) -> None:
        stem = snap_dir / f"{tag}_step{step:04d}"
        mmio.write_grid(field, config.nx, config.ny, stem.with_suffix(".txt"))
        mmio.write_vector(field, stem.with_suffix(".mtx"))

    if snap_dir is not None:
        snap_dir.mkdir(parents=True, exist_ok=True)
        for m in methods:
            dump(m.tag, 0, initial_field(config))

    def on_step(kind, res):
        last = res.step == config.n_steps
        if snap_dir is not None and (last or (args.snapshot_every and res.step % args.snapshot_every == 0)):
            dump(kind.tag, res.step, res.field)

    runs = [bench.run_heat(config, m, on_step=on_step) for m in methods]
    solve_rows = [r for run in runs for r in run.solve_records]
    step_rows = [r for run in runs for r in run.step_records]
    bench.fill_speedups(solve_rows)
    bench.fill_speedups(step_rows)
    by_method = {run.method: run for run in runs}
    if "method0" in by_method:
        for run in runs:
            if run.method != "method0":
                log.info("%s final-field relative L2 difference to method0: %.3e",
                         run.method, bench.relative_l2(run.field, by_method["method0"].field))
    with _open_out(args.out) as fh:
        bench.write_csv(solve_rows + step_rows, fh)
    ok = all(r.converged for r in step_rows)
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_sweep(args) -> int:
    if args.values:
        values = _floats(args.values)
    elif args.param == "alpha":
        values = [10.0**-k for k in range(12)]
    else:
        values = list(range(7))
    config = _solver_config(args)
    if args.matrix:
        prob = _load_system(args)
        pid = args.problem_id or Path(args.matrix).stem
    else:
        hc = _heat_config(args, prefix="heat_", eps=args.eps)
        prob = bench.heat_problem(hc, advance=args.heat_advance)
        pid = args.problem_id or f"heat{hc.nx}x{hc.ny}s{args.heat_advance}"
    records, prefixes = bench.sweep(prob, args.param, values, _selector(args), config, pid)
    with _open_out(args.out) as fh:
        bench.write_csv(records, fh, prefix=prefixes)
    return EXIT_OK if all(r.converged for r in records) else EXIT_NOT_CONVERGED


COMMANDS = {"solve": cmd_solve, "heat": cmd_heat, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    warm_up()
    try:
        return COMMANDS[args.cmd](args)
    except (DivergenceError, NonPositiveTemperature) as exc:
        print(f"locsolve: solve failed: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (OSError, DimensionError, ZeroDiagonalError, mmio.MatrixMarketError, ValueError) as exc:
        print(f"locsolve: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
