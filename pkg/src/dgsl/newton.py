"""Newton iteration for the discrete semilinear system.

Each step solves J(u^k) delta = -residual(u^k) with the exact Jacobian
(stiffness plus N'-weighted mass), then updates u^{k+1} = u^k + alpha
delta where alpha comes from residual-decrease backtracking. The
stiffness part of the operator is assembled once per solve; only the
mass weight changes between iterations.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .assembly import (AssemblyConfig, _nonlinear_load, _tables,
                       assemble_bilinear, assemble_weighted_mass,
                       element_point_values)
from .errors import NewtonDiverged, NotConverged
from .linear_solver import solve_spd
from .problems import Problem
from .space import DGSpace, DGVector, interpolate


@dataclass(frozen=True)
class NewtonConfig:
    """Tolerances and stepping policy for the Newton loop.

    Convergence is declared on the algebraic residual 2-norm:
    ||residual|| <= max(abs_tol, rel_tol * initial residual).
    `initial_guess` is either "zero" or a scalar field callback whose
    interpolant seeds the iteration.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-12
    max_iterations: int = 25
    damping: bool = True
    backtrack_factor: float = 0.5
    max_backtracks: int = 30
    initial_guess: object = "zero"
    linear_method: str = "direct"
    linear_tol: float = 1e-12

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class NewtonReport:
    residual_norms: List[float] = field(default_factory=list)
    converged: bool = False
    linear_reports: list = field(default_factory=list)

    @property
    def iterations(self):
        return max(len(self.residual_norms) - 1, 0)


def _check_sign_assumption(space, u, problem, values_table):
    uvals = element_point_values(space, u, values_table)
    worst = float(problem.d_nonlinearity(uvals).min())
    if worst < -1e-13:
        warnings.warn(
            f"N'(u) dips to {worst:.3e} over the iterate range; the "
            "well-posedness assumption N' >= 0 does not hold here",
            stacklevel=3,
        )


def solve_semilinear(space: DGSpace, problem: Problem, cfg: AssemblyConfig,
                     ncfg: Optional[NewtonConfig] = None):
    """Solve a(u_h, v) = (f(u_h), v) by damped Newton.

    Returns (DGVector, NewtonReport). Raises NewtonDiverged when
    backtracking cannot decrease the residual and NotConverged when the
    iteration budget is exhausted; linear-solver errors propagate.
    """
    ncfg = ncfg or NewtonConfig()
    stiffness = assemble_bilinear(space, cfg)

    if ncfg.initial_guess == "zero":
        u = np.zeros(space.total_dofs)
    else:
        u = interpolate(space, ncfg.initial_guess).coeffs.copy()

    def residual(vec):
        return stiffness @ vec - _nonlinear_load(
            space, DGVector(space, vec), problem, cfg)

    report = NewtonReport()
    res = residual(u)
    res_norm = float(np.linalg.norm(res))
    report.residual_norms.append(res_norm)
    threshold = max(ncfg.abs_tol, ncfg.rel_tol * res_norm)

    for _ in range(ncfg.max_iterations):
        if res_norm <= threshold:
            report.converged = True
            break
        jac = assemble_weighted_mass(space, problem.d_nonlinearity, cfg,
                                     at_field=DGVector(space, u)) + stiffness
        delta, lin = solve_spd(jac, -res, tol=ncfg.linear_tol,
                               method=ncfg.linear_method,
                               block_size=space.dofs_per_element)
        report.linear_reports.append(lin)

        alpha = 1.0
        for _ in range(ncfg.max_backtracks + 1):
            trial = u + alpha * delta
            trial_res = residual(trial)
            trial_norm = float(np.linalg.norm(trial_res))
            if trial_norm < res_norm or not ncfg.damping:
                break
            alpha *= ncfg.backtrack_factor
        else:
            raise NewtonDiverged(
                f"residual stuck at {res_norm:.3e} after "
                f"{ncfg.max_backtracks} backtracking steps", report=report)

        u, res, res_norm = trial, trial_res, trial_norm
        report.residual_norms.append(res_norm)
    else:
        if res_norm <= threshold:
            report.converged = True

    if not report.converged:
        raise NotConverged(
            f"newton used {ncfg.max_iterations} iterations, residual "
            f"{res_norm:.3e} > {threshold:.3e}", report=report)

    vol, _ = _tables(space.basis, cfg.resolved_volume_degree(space.degree),
                     cfg.resolved_edge_degree(space.degree))
    solution = DGVector(space, u)
    _check_sign_assumption(space, solution, problem, vol.values)
    return solution, report
