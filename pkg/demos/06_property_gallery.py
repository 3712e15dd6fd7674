#!/usr/bin/env python3
"""Run the structural property suites and show a deliberate failure.

The suites verify operator symmetry, the continuity and coercivity
bounds, the element-boundary edge identity, quadrature exactness,
projection/interpolation rates, Newton's contraction, and trace-constant
mesh independence. Overriding the penalty to a tiny value breaks
coercivity on purpose.
"""

from dgsl import run_property_suite

print("full suite:")
for result in run_property_suite("all"):
    print(" ", result.line())

print("\ncoercivity with penalty 0.01 (expected to fail):")
(result,) = run_property_suite("coercivity", {"penalty": 0.01})
print(" ", result.line())
