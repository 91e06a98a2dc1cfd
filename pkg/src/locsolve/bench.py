"""Benchmark records, CSV interchange and experiment drivers."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from .heat import HeatConfig, LinearProblem, assemble_picard_system, initial_field, picard_step, run_simulation
from .krylov import SolverConfig
from .local import Method, MethodSelector, SolveReport, local_character_solve

CSV_HEADER = [
    "problem_id", "method", "N", "K", "eta", "cpu_total", "cpu_domain", "cpu_subsystem",
    "cpu_global", "iter_sub", "iter_glb", "converged_local", "speedup",
]
SWEEP_PREFIX = ["parameter", "value"]


@dataclass
class BenchRecord:
    problem_id: str
    method: str
    N: int
    K: int
    eta: float
    cpu_total: float
    cpu_domain: float
    cpu_subsystem: float
    cpu_global: float
    iter_sub: int
    iter_glb: int
    converged_local: bool
    speedup: float | None = None
    # not part of the CSV; drives exit codes
    converged: bool = True

    def row(self) -> list[str]:
        return [
            self.problem_id, self.method, str(self.N), str(self.K), repr(self.eta),
            repr(self.cpu_total), repr(self.cpu_domain), repr(self.cpu_subsystem), repr(self.cpu_global),
            str(self.iter_sub), str(self.iter_glb), "1" if self.converged_local else "0",
            "" if self.speedup is None else repr(self.speedup),
        ]

    @classmethod
    def from_row(cls, row: dict) -> "BenchRecord":
        return cls(
            problem_id=row["problem_id"],
            method=row["method"],
            N=int(row["N"]),
            K=int(row["K"]),
            eta=float(row["eta"]),
            cpu_total=float(row["cpu_total"]),
            cpu_domain=float(row["cpu_domain"]),
            cpu_subsystem=float(row["cpu_subsystem"]),
            cpu_global=float(row["cpu_global"]),
            iter_sub=int(row["iter_sub"]),
            iter_glb=int(row["iter_glb"]),
            converged_local=row["converged_local"] == "1",
            speedup=float(row["speedup"]) if row["speedup"] else None,
        )


def record_from_report(problem_id: str, report: SolveReport) -> BenchRecord:
    t = report.timings
    return BenchRecord(
        problem_id=problem_id,
        method=report.method.kind.tag,
        N=report.N,
        K=report.K,
        eta=report.eta,
        cpu_total=t.total,
        cpu_domain=t.domain_construction,
        cpu_subsystem=t.subsystem_solve,
        cpu_global=t.global_solve,
        iter_sub=report.iterations_subsystem,
        iter_glb=report.iterations_global,
        converged_local=report.converged_after_local,
        converged=report.converged,
    )


def aggregate(problem_id: str, method: str, records: list[BenchRecord]) -> BenchRecord:
    """Sum of several solves; N and K are summed so eta stays K/N (the mean eta
    when every solve has the same N)."""
    N = sum(r.N for r in records)
    K = sum(r.K for r in records)
    return BenchRecord(
        problem_id=problem_id,
        method=method,
        N=N,
        K=K,
        eta=K / N if N else 0.0,
        cpu_total=sum(r.cpu_total for r in records),
        cpu_domain=sum(r.cpu_domain for r in records),
        cpu_subsystem=sum(r.cpu_subsystem for r in records),
        cpu_global=sum(r.cpu_global for r in records),
        iter_sub=sum(r.iter_sub for r in records),
        iter_glb=sum(r.iter_glb for r in records),
        converged_local=bool(records) and all(r.converged_local for r in records),
        converged=all(r.converged for r in records),
    )


def fill_speedups(records: list[BenchRecord], key=lambda r: r.problem_id) -> None:
    base = {key(r): r.cpu_total for r in records if r.method == "method0"}
    for r in records:
        b = base.get(key(r))
        if b is not None and r.cpu_total > 0:
            r.speedup = b / r.cpu_total
        else:
            r.speedup = None


def write_csv(records, fh, prefix: list[tuple] | None = None) -> None:
    w = csv.writer(fh, lineterminator="\n")
    header = (SWEEP_PREFIX if prefix is not None else []) + CSV_HEADER
    w.writerow(header)
    for i, r in enumerate(records):
        lead = [str(v) for v in prefix[i]] if prefix is not None else []
        w.writerow(lead + r.row())


def read_csv(fh) -> list[BenchRecord]:
    return [BenchRecord.from_row(row) for row in csv.DictReader(fh)]


def to_csv_string(records) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def solve_methods(A, b, x0, methods, selector: MethodSelector, config: SolverConfig, problem_id: str):
    """Run each method on one system; returns (records, reports)."""
    records, reports = [], []
    for m in methods:
        sel = replace(selector, kind=Method.parse(m))
        rep = local_character_solve(A, b, x0, sel, config)
        reports.append(rep)
        records.append(record_from_report(problem_id, rep))
    fill_speedups(records)
    return records, reports


@dataclass
class HeatRun:
    method: str
    field: np.ndarray
    steps: list
    solve_records: list[BenchRecord]
    step_records: list[BenchRecord]


def run_heat(config: HeatConfig, method, on_step=None) -> HeatRun:
    kind = Method.parse(method)
    cfg = replace(config, selector=replace(config.selector, kind=kind))
    solve_records: list[BenchRecord] = []
    step_records: list[BenchRecord] = []

    def _collect(res):
        recs = [record_from_report(f"s{res.step:04d}p{s + 1:03d}", rep) for s, rep in enumerate(res.reports)]
        solve_records.extend(recs)
        agg = aggregate(f"s{res.step:04d}", kind.tag, recs)
        agg.converged = agg.converged and res.converged
        step_records.append(agg)
        if on_step is not None:
            on_step(kind, res)

    T, steps = run_simulation(cfg, on_step=_collect)
    return HeatRun(kind.tag, T, steps, solve_records, step_records)


def heat_problem(config: HeatConfig, advance: int = 0) -> LinearProblem:
    """First Picard system after advancing `advance` steps with the configured method."""
    T = initial_field(config)
    for n in range(1, advance + 1):
        T = picard_step(T, config, step=n).field
    return assemble_picard_system(T, T, config)


def sweep(problem: LinearProblem, parameter: str, values, selector: MethodSelector, config: SolverConfig, problem_id: str):
    """One record per parameter value plus a method0 reference row.

    Returns (records, prefixes) where prefixes hold (parameter, value) per row.
    """
    if parameter not in ("alpha", "emax"):
        raise ValueError("sweep parameter must be 'alpha' or 'emax'")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    records, prefixes = [], []
    base = local_character_solve(problem.A, problem.b, problem.x0, replace(selector, kind=Method.BASELINE), config)
    records.append(record_from_report(problem_id, base))
    prefixes.append((parameter, ""))
    for v in values:
        if parameter == "alpha":
            sel = replace(selector, kind=Method.GRADIENT, alpha=float(v))
        else:
            if int(v) != v or v < 0:
                raise ValueError("E_max values must be non-negative integers")
            sel = replace(selector, kind=Method.RESIDUAL, e_max=int(v))
        rep = local_character_solve(problem.A, problem.b, problem.x0, sel, config)
        records.append(record_from_report(problem_id, rep))
        prefixes.append((parameter, _fmt_value(v)))
    fill_speedups(records)
    return records, prefixes


def _fmt_value(v) -> str:
    if isinstance(v, (int, np.integer)) or (isinstance(v, float) and v.is_integer() and abs(v) >= 1 and abs(v) < 1e6):
        return str(int(v))
    return f"{float(v):.6g}"


def relative_l2(a, b) -> float:
    nb = float(np.linalg.norm(b))
    d = float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    return d / nb if nb else d
