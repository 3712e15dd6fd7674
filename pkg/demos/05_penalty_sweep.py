#!/usr/bin/env python3
"""Effect of the penalty parameter on both error norms at a fixed mesh.

The energy error decreases as the penalty grows (jumps are squeezed
toward the conforming limit) while the L2 error creeps up slightly.
"""

from dgsl import RunConfig, run_lambda_sweep

base = RunConfig(degree=1, penalty=100.0, levels=(32,))
sweep = run_lambda_sweep(base, [10.0, 100.0, 1000.0, 2000.0])

print("penalty  L2 error     energy error")
for lam in sweep["summary"]["penalties"]:
    row = sweep["reports"][lam].rows[-1]
    print(f"{lam:7g}  {row.l2_error:.4e}  {row.dg_error:.4e}")

summary = sweep["summary"]
print(f"\nenergy error strictly decreasing: {summary['dg_decreasing']}")
print(f"L2 error monotonically increasing: {summary['l2_increasing']}")
