#!/usr/bin/env python3
"""Solve -Lap u + u^3 = g with the manufactured sine solution and watch
Newton's quadratic contraction, then measure both error norms."""

import numpy as np

import dgsl

problem = dgsl.get_problem("sine")
penalty = 100.0

space = dgsl.DGSpace(dgsl.build_structured(32), degree=1)
config = dgsl.AssemblyConfig(penalty=penalty)
solution, report = dgsl.solve_semilinear(space, problem, config)

print(f"mesh 32x32x2, P1, {space.total_dofs} unknowns")
print("newton residual history:")
for k, r in enumerate(report.residual_norms):
    print(f"  iter {k}: {r:.3e}")

l2 = dgsl.l2_error(space, solution, problem.exact)
dg = dgsl.dg_error(space, solution, problem.exact, penalty)
print(f"\nerror in L2:          {l2:.4e}")
print(f"error in energy norm: {dg:.4e}")

# The discrete solution is also the unique one: starting Newton from the
# interpolant of the exact solution lands on the same coefficients.
other, _ = dgsl.solve_semilinear(
    space, problem, config,
    dgsl.NewtonConfig(initial_guess=problem.exact.value))
gap = np.linalg.norm(solution.coeffs - other.coeffs)
print(f"\nzero-start vs interpolant-start coefficient gap: {gap:.2e}")

# Distance to the nodal interpolant: a much smaller, superconvergent
# quantity; this is what reference implementations often report.
interp = dgsl.interpolate(space, problem.exact.value)
diff = dgsl.DGVector(space, interp.coeffs - solution.coeffs)
from dgsl.analysis import dg_norm_discrete, l2_norm_discrete
print(f"\ndistance to interpolant, L2:     {l2_norm_discrete(space, diff):.4e}")
print(f"distance to interpolant, energy: "
      f"{dg_norm_discrete(space, diff, penalty):.4e}")
