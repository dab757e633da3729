"""Convergence studies over dyadic grid refinements, and report emission."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import assemble, dump_system, solve
from .norms import exact_on_grid, grid_linf, relative_l2, successive_norms
from .problem import GridSpec, classify_points
from .registry import EXAMPLES, build_problem

__all__ = ["ConvergenceReport", "ConvergenceRow", "emit_outputs", "run_convergence",
           "solve_example"]

CSV_COLUMNS = ("J", "h", "rel_l2", "order_l2", "linf", "order_linf",
               "succ_l2", "succ_linf", "kappa", "seconds")


@dataclass
class ConvergenceRow:
    J: int
    h: float
    rel_l2: float | None = None
    order_l2: float | None = None
    linf: float | None = None
    order_linf: float | None = None
    succ_l2: float | None = None
    succ_linf: float | None = None
    kappa: float | None = None
    seconds: float | None = None


@dataclass
class ConvergenceReport:
    example: str
    scheme: str
    rows: list = field(default_factory=list)
    solutions: dict = field(default_factory=dict)

    def row(self, J: int) -> ConvergenceRow:
        for r in self.rows:
            if r.J == J:
                return r
        raise KeyError(f"no row for J={J}")


def solve_example(problem, J: int, scheme: str = "hybrid", kappa: bool = False,
                  dump_path: str | None = None):
    """Assemble and solve one level; returns (u grid, report, classification)."""
    grid = GridSpec(problem.domain, J)
    cls = classify_points(grid, problem.psi)
    system = assemble(problem, grid, cls, scheme=scheme)
    if dump_path:
        dump_system(system, dump_path)
    rep = solve(system, kappa=kappa)
    return rep.u, rep, cls


def run_convergence(example: str, levels, scheme: str = "hybrid",
                    kappa: bool = False, keep_solutions: bool = False,
                    progress=None) -> ConvergenceReport:
    """Solve an example over J = levels[0] .. levels[1] and tabulate errors.

    Known-u examples report relative l2 and max errors against the exact
    solution plus successive-refinement norms; data-only examples report
    the successive norms alone.  Fitted orders compare consecutive levels.
    """
    jmin, jmax = levels
    if jmin > jmax:
        raise ValueError("levels must satisfy jmin <= jmax")
    exdef = EXAMPLES[example]
    problem = build_problem(example)
    report = ConvergenceReport(example=example, scheme=scheme)
    solutions = {}
    for J in range(jmin, jmax + 1):
        if progress:
            progress(f"solving {example} at J={J} ({scheme})")
        t0 = time.perf_counter()
        grid = GridSpec(problem.domain, J)
        u, rep, _ = solve_example(problem, J, scheme=scheme, kappa=kappa)
        seconds = time.perf_counter() - t0
        if rep.relative_residual > 1e-8:
            raise RuntimeError(
                f"solver residual {rep.relative_residual:.2e} at J={J} exceeds 1e-8")
        solutions[J] = u
        row = ConvergenceRow(J=J, h=grid.h, kappa=rep.kappa, seconds=seconds)
        if exdef.known_u:
            ue = exact_on_grid(problem, grid)
            row.rel_l2 = relative_l2(u, ue, grid.h)
            row.linf = grid_linf(u - ue)
        report.rows.append(row)
    # successive norms and fitted orders
    for row in report.rows:
        if row.J + 1 in solutions:
            row.succ_l2, row.succ_linf = successive_norms(
                solutions[row.J], solutions[row.J + 1],
                GridSpec(problem.domain, row.J).h)
    for prev, row in zip(report.rows, report.rows[1:]):
        if exdef.known_u:
            if prev.rel_l2 and row.rel_l2:
                row.order_l2 = math.log2(prev.rel_l2 / row.rel_l2)
            if prev.linf and row.linf:
                row.order_linf = math.log2(prev.linf / row.linf)
        else:
            if prev.succ_l2 and row.succ_l2:
                row.order_l2 = math.log2(prev.succ_l2 / row.succ_l2)
            if prev.succ_linf and row.succ_linf:
                row.order_linf = math.log2(prev.succ_linf / row.succ_linf)
    if keep_solutions:
        report.solutions = solutions
    return report


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.5e}"


def report_csv(report: ConvergenceReport) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in report.rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def report_markdown(report: ConvergenceReport) -> str:
    header = "| " + " | ".join(CSV_COLUMNS) + " |"
    sep = "|" + "|".join("---" for _ in CSV_COLUMNS) + "|"
    lines = [f"### {report.example} ({report.scheme})", "", header, sep]
    for r in report.rows:
        lines.append("| " + " | ".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def report_plotdata(report: ConvergenceReport) -> str:
    """log2(h) versus log10(error) pairs per norm, for external plotting."""
    lines = ["# norm log2_h log10_error"]
    for norm in ("rel_l2", "linf", "succ_l2", "succ_linf"):
        for r in report.rows:
            v = getattr(r, norm)
            if v is not None and v > 0:
                lines.append(f"{norm} {math.log2(r.h):.6f} {math.log10(v):.6f}")
    return "\n".join(lines) + "\n"


def emit_outputs(report: ConvergenceReport, outdir, formats=("csv", "md", "plotdata")):
    """Write the report files; returns the list of paths written."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{report.example}_{report.scheme}"
    written = []
    if "csv" in formats:
        p = out / f"{stem}.csv"
        p.write_text(report_csv(report), encoding="utf-8")
        written.append(p)
    if "md" in formats:
        p = out / f"{stem}.md"
        p.write_text(report_markdown(report), encoding="utf-8")
        written.append(p)
    if "plotdata" in formats:
        p = out / f"{stem}_plot.txt"
        p.write_text(report_plotdata(report), encoding="utf-8")
        written.append(p)
    return written
