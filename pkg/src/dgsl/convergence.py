"""Mesh-refinement sweeps and their tabulated reports.

A run solves the configured problem on each refinement level, measures
both error norms against the manufactured solution, and tabulates
(h, errors, observed orders, Newton iterations, unknown counts).
Structured levels report the nominal size 1/n; perturbed and imported
levels report the maximum element diameter. Identical configurations
(including seeds) produce byte-identical CSV output.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence

from .analysis import dg_error, l2_error, observed_orders
from .assembly import AssemblyConfig
from .errors import ConfigError
from .mesh import build_perturbed, build_structured, import_mesh
from .newton import NewtonConfig, solve_semilinear
from .problems import get_problem
from .space import DGSpace

CSV_HEADER = "h,l2_error,l2_order,dg_error,dg_order,newton_iters,dofs"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one refinement sweep."""

    problem: str = "sine"
    degree: int = 1
    penalty: float = 100.0
    mesh_kind: str = "structured"            # structured | perturbed | files
    levels: Sequence = (16, 32, 64, 128)
    amplitude: float = 0.2
    seed: int = 42
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    volume_degree: Optional[int] = None
    edge_degree: Optional[int] = None
    output_path: Optional[str] = None
    output_format: str = "csv"               # csv | markdown

    def validate(self):
        if self.mesh_kind not in ("structured", "perturbed", "files"):
            raise ConfigError(f"unknown mesh.kind {self.mesh_kind!r}")
        if not self.levels:
            raise ConfigError("level list is empty")
        if self.output_format not in ("csv", "markdown"):
            raise ConfigError(f"unknown output.format {self.output_format!r}")
        if self.degree not in (1, 2, 3):
            raise ConfigError(f"degree must be 1, 2 or 3, got {self.degree}")
        if self.penalty <= 0:
            raise ConfigError("penalty must be positive")
        if self.mesh_kind == "files":
            for path in self.levels:
                if not Path(path).is_file():
                    raise ConfigError(f"mesh file not found: {path}")
        else:
            for n in self.levels:
                if not (isinstance(n, int) and n >= 1):
                    raise ConfigError(f"bad level {n!r}; need integers >= 1")

    def assembly_config(self):
        return AssemblyConfig(penalty=self.penalty,
                              volume_degree=self.volume_degree,
                              edge_degree=self.edge_degree)

    def build_level_mesh(self, index):
        level = self.levels[index]
        if self.mesh_kind == "structured":
            return build_structured(level)
        if self.mesh_kind == "perturbed":
            return build_perturbed(level, self.amplitude, self.seed + index)
        return import_mesh(Path(level).read_text())


@dataclass(frozen=True)
class ReportRow:
    h: float
    l2_error: float
    l2_order: Optional[float]
    dg_error: float
    dg_order: Optional[float]
    newton_iters: int
    dofs: int


@dataclass
class ConvergenceReport:
    """Per-level error table plus the run's metadata."""

    rows: List[ReportRow]
    metadata: dict

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(",".join([
                repr(row.h),
                f"{row.l2_error:.10e}",
                "" if row.l2_order is None else f"{row.l2_order:.4f}",
                f"{row.dg_error:.10e}",
                "" if row.dg_order is None else f"{row.dg_order:.4f}",
                str(row.newton_iters),
                str(row.dofs),
            ]))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        header = ["h", "l2_error", "order", "dg_error", "order"]
        body = [[
            f"{row.h:.6g}",
            f"{row.l2_error:.2e}",
            "--" if row.l2_order is None else f"{row.l2_order:.2f}",
            f"{row.dg_error:.2e}",
            "--" if row.dg_order is None else f"{row.dg_order:.2f}",
        ] for row in self.rows]
        widths = [max(len(header[c]), *(len(r[c]) for r in body))
                  for c in range(len(header))]
        def fmt(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
        lines = [fmt(header),
                 "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        lines += [fmt(r) for r in body]
        return "\n".join(lines) + "\n"

    def serialize(self, output_format: str) -> str:
        return self.to_csv() if output_format == "csv" else self.to_markdown()

    def final_orders(self):
        last = self.rows[-1]
        return last.l2_order, last.dg_order


def _metadata(cfg: RunConfig, acfg: AssemblyConfig):
    return {
        "problem": cfg.problem,
        "degree": cfg.degree,
        "penalty": cfg.penalty,
        "mesh_kind": cfg.mesh_kind,
        "levels": list(cfg.levels),
        "volume_degree": acfg.resolved_volume_degree(cfg.degree),
        "edge_degree": acfg.resolved_edge_degree(cfg.degree),
    }


def report_from_raw(raw, metadata) -> ConvergenceReport:
    """Assemble a report from per-level (h, l2, dg, iters, dofs) tuples;
    also used to flush partial results when a level fails."""
    if len(raw) > 1:
        l2_orders = [None] + observed_orders([(row[0], row[1]) for row in raw])
        dg_orders = [None] + observed_orders([(row[0], row[2]) for row in raw])
    else:
        l2_orders = [None] * len(raw)
        dg_orders = [None] * len(raw)
    rows = [ReportRow(h, e2, o2, ed, od, its, dofs)
            for (h, e2, ed, its, dofs), o2, od in zip(raw, l2_orders, dg_orders)]
    return ConvergenceReport(rows, metadata)


def run_convergence(cfg: RunConfig, progress=None) -> ConvergenceReport:
    """Solve on every level and tabulate errors and observed orders."""
    cfg.validate()
    problem = get_problem(cfg.problem)
    if problem.exact is None:
        raise ConfigError(
            f"problem {cfg.problem!r} has no exact solution; "
            "convergence runs need a manufactured problem")
    acfg = cfg.assembly_config()
    ncfg = cfg.newton
    if ncfg.initial_guess == "exact":
        ncfg = replace(ncfg, initial_guess=problem.exact.value)

    raw = []
    for index in range(len(cfg.levels)):
        mesh = cfg.build_level_mesh(index)
        space = DGSpace(mesh, cfg.degree)
        solution, report = solve_semilinear(space, problem, acfg, ncfg)
        e_l2 = l2_error(space, solution, problem.exact)
        e_dg = dg_error(space, solution, problem.exact, cfg.penalty)
        raw.append((mesh.nominal_h, e_l2, e_dg, report.iterations,
                    space.total_dofs))
        if progress is not None:
            progress(index, raw[-1])

    return report_from_raw(raw, _metadata(cfg, acfg))


def run_lambda_sweep(base: RunConfig, penalties: Sequence[float],
                     progress=None) -> dict:
    """One convergence report per penalty value, plus the cross-penalty
    trend summary at the finest common level."""
    reports = {}
    for lam in penalties:
        cfg = replace(base, penalty=float(lam))
        reports[float(lam)] = run_convergence(cfg, progress=progress)

    lams = [float(l) for l in penalties]
    finest_dg = [reports[l].rows[-1].dg_error for l in lams]
    finest_l2 = [reports[l].rows[-1].l2_error for l in lams]
    summary = {
        "penalties": lams,
        "dg_errors": finest_dg,
        "l2_errors": finest_l2,
        "dg_decreasing": all(a > b for a, b in zip(finest_dg, finest_dg[1:])),
        "l2_increasing": all(a < b for a, b in zip(finest_l2, finest_l2[1:])),
    }
    return {"reports": reports, "summary": summary}
