#!/usr/bin/env python3
"""A mesh-refinement study reproducing the headline convergence orders:
h^r in the energy norm and h^(r+1) in L2.

The default levels keep this quick; pass --full for the 16..128 ladder.
"""

import sys

from dgsl import RunConfig, run_convergence

full = "--full" in sys.argv
levels = (16, 32, 64, 128) if full else (4, 8, 16, 32)

for degree in (1, 2):
    cfg = RunConfig(degree=degree, penalty=100.0, levels=levels)
    report = run_convergence(cfg)
    print(f"\nP{degree}, penalty 100, structured levels {levels}:")
    print(report.to_markdown())
    l2_order, dg_order = report.final_orders()
    print(f"final observed orders: L2 {l2_order:.2f} (expect {degree + 1}), "
          f"energy {dg_order:.2f} (expect {degree})")

print("\nperturbed-mesh robustness (P1, amplitude 0.2):")
cfg = RunConfig(degree=1, penalty=100.0, mesh_kind="perturbed",
                amplitude=0.2, seed=42, levels=levels[:3])
print(run_convergence(cfg).to_markdown())
