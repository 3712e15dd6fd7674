"""Newton solver behavior on linear and semilinear problems."""

import numpy as np
import pytest

import dgsl
from dgsl import AssemblyConfig, NewtonConfig, solve_semilinear
from dgsl.analysis import l2_norm_discrete
from dgsl.errors import IndefiniteOperator, NotConverged
from dgsl.problems import Problem
from dgsl.properties import newton_contraction_slope

from conftest import space_on


def linear_source_problem():
    # f(x, u) = g(x): no u-dependence, so Newton is a single linear solve
    pi = np.pi
    return Problem(
        name="linear-source",
        nonlinearity=lambda u: 0.0 * u,
        d_nonlinearity=lambda u: 0.0 * u,
        source=lambda x, y: 2 * pi ** 2 * np.sin(pi * x) * np.sin(pi * y),
    )


def test_linear_problem_converges_in_one_iteration():
    space = space_on(8, 1)
    _, report = solve_semilinear(space, linear_source_problem(),
                                 AssemblyConfig(penalty=100.0))
    assert report.converged
    assert report.iterations == 1


def test_sine_problem_regression(sine):
    space = space_on(16, 1)
    u, report = solve_semilinear(space, sine, AssemblyConfig(penalty=100.0))
    assert report.converged
    assert report.residual_norms[-1] <= 1e-10
    assert report.iterations <= 8
    # the returned field really solves the discrete system
    res = dgsl.assemble_residual(space, u, sine, AssemblyConfig(penalty=100.0))
    assert np.linalg.norm(res) <= 1e-9


@pytest.mark.parametrize("n", [8, 16])
def test_quadratic_contraction(sine, n):
    space = space_on(n, 1)
    _, report = solve_semilinear(space, sine, AssemblyConfig(penalty=100.0),
                                 NewtonConfig(abs_tol=1e-12))
    slope = newton_contraction_slope(report.residual_norms)
    assert 1.7 <= slope <= 2.3


def test_residuals_strictly_decrease(sine):
    space = space_on(8, 1)
    _, report = solve_semilinear(space, sine, AssemblyConfig(penalty=100.0))
    norms = report.residual_norms
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_zero_and_interpolant_starts_agree(sine):
    space = space_on(8, 1)
    cfg = AssemblyConfig(penalty=100.0)
    u0, _ = solve_semilinear(space, sine, cfg, NewtonConfig())
    u1, _ = solve_semilinear(space, sine, cfg,
                             NewtonConfig(initial_guess=sine.exact.value))
    gap = l2_norm_discrete(space, dgsl.DGVector(space,
                                                u0.coeffs - u1.coeffs))
    assert gap <= 1e-8


def test_budget_exhaustion_raises(sine):
    space = space_on(8, 1)
    with pytest.raises(NotConverged) as excinfo:
        solve_semilinear(space, sine, AssemblyConfig(penalty=100.0),
                         NewtonConfig(max_iterations=1))
    assert excinfo.value.report.iterations == 1


def test_pcg_newton_matches_direct(sine):
    space = space_on(8, 1)
    cfg = AssemblyConfig(penalty=100.0)
    u_dir, _ = solve_semilinear(space, sine, cfg)
    u_pcg, _ = solve_semilinear(space, sine, cfg,
                                NewtonConfig(linear_method="pcg"))
    assert np.linalg.norm(u_dir.coeffs - u_pcg.coeffs) \
        <= 1e-8 * np.linalg.norm(u_dir.coeffs)


def test_sign_assumption_violation_warns():
    # N'(u) = -1 < 0 breaks the monotonicity assumption; the solve still
    # runs on a coarse mesh but must warn
    problem = Problem(
        name="wrong-sign",
        nonlinearity=lambda u: -u,
        d_nonlinearity=lambda u: -np.ones_like(u),
        source=lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y),
    )
    space = space_on(4, 1)
    with pytest.warns(UserWarning, match="N'"):
        solve_semilinear(space, problem, AssemblyConfig(penalty=100.0))


def test_strongly_indefinite_propagates():
    # N'(u) = -50 makes the Jacobian indefinite; the pcg path must say so
    problem = Problem(
        name="indefinite",
        nonlinearity=lambda u: -50.0 * u,
        d_nonlinearity=lambda u: -50.0 * np.ones_like(u),
        source=lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y),
    )
    space = space_on(8, 1)
    with pytest.raises(IndefiniteOperator):
        solve_semilinear(space, problem, AssemblyConfig(penalty=100.0),
                         NewtonConfig(linear_method="pcg"))


def test_config_validation():
    with pytest.raises(ValueError):
        NewtonConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        NewtonConfig(max_iterations=0)
