"""Error norms, energy projection, observed orders, trace constant."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import dgsl
from dgsl import (AssemblyConfig, DGVector, assemble_bilinear, dg_error,
                  dg_norm_discrete, elliptic_project, interpolate, l2_error,
                  observed_orders)
from dgsl.analysis import (apply_bilinear_to_field, estimate_trace_constant,
                           l2_norm_discrete)
from dgsl.errors import InsufficientLevels
from dgsl.problems import ExactSolution
from dgsl.quadrature import triangle_rule

from conftest import space_on


def linear_exact(a=1.5, b=-0.75, c=0.2):
    return ExactSolution(
        value=lambda x, y: a * x + b * y + c,
        gradient=lambda x, y: (a * np.ones_like(x), b * np.ones_like(y)),
        laplacian=lambda x, y: 0.0 * x,
    )


ZERO = ExactSolution(value=lambda x, y: 0.0 * x,
                     gradient=lambda x, y: (0.0 * x, 0.0 * y),
                     laplacian=lambda x, y: 0.0 * x)


def test_l2_error_definitional_cases(sine):
    space = space_on(8, 1)
    assert l2_error(space, DGVector.zeros(space), ZERO) == 0.0
    v = interpolate(space, sine.exact.value)
    err = l2_error(space, v, sine.exact)
    assert err > 0.0
    # the default analysis degree leaves quadrature error far below the
    # value itself; a much finer rule must agree to many digits
    assert_allclose(err, l2_error(space, v, sine.exact, quad_degree=12),
                    rtol=1e-7)


def test_exact_solution_gradient_self_consistency(sine, rng):
    x = rng.uniform(0.1, 0.9, 40)
    y = rng.uniform(0.1, 0.9, 40)
    eps = 1e-6
    gx, gy = sine.exact.gradient(x, y)
    fd_x = (sine.exact.value(x + eps, y) - sine.exact.value(x - eps, y)) / (2 * eps)
    fd_y = (sine.exact.value(x, y + eps) - sine.exact.value(x, y - eps)) / (2 * eps)
    assert np.abs(gx - fd_x).max() < 1e-6
    assert np.abs(gy - fd_y).max() < 1e-6


def test_dg_error_exact_reproduction_is_zero():
    # linear exact, r = 1: interpolant reproduces it, every term vanishes
    space = space_on(3, 1)
    v = interpolate(space, linear_exact().value)
    assert dg_error(space, v, linear_exact(), 100.0) <= 1e-11


def test_interpolant_energy_rate_is_one(sine):
    errors = []
    for n in (8, 16, 32):
        space = space_on(n, 1)
        v = interpolate(space, sine.exact.value)
        errors.append((1.0 / n, dg_error(space, v, sine.exact, 100.0)))
    for order in observed_orders(errors):
        assert abs(order - 1.0) <= 0.15


def test_dg_error_dominates_volume_part(sine):
    # edge terms are nonnegative, so dropping them cannot increase the value
    space = space_on(8, 1)
    v = interpolate(space, sine.exact.value)
    full = dg_error(space, v, sine.exact, 100.0)
    rule = triangle_rule(8)
    gtab = space.basis.gradients(rule.points)
    grads = np.einsum("ed,qda,eab->eqb", v.by_element(), gtab,
                      space.inv_jacobians)
    pts = space.physical_points(rule.points)
    gx, gy = sine.exact.gradient(pts[..., 0], pts[..., 1])
    diff = np.stack([gx, gy], axis=-1) - grads
    volume = np.sqrt(np.einsum("e,q,eqa->", space.dets, rule.weights,
                               diff ** 2))
    assert full >= volume - 1e-13


def test_discrete_norm_axioms(rng):
    space = space_on(3, 2)
    zero = dg_norm_discrete(space, DGVector.zeros(space), 100.0)
    assert zero == 0.0
    for _ in range(20):
        v = DGVector(space, rng.standard_normal(space.total_dofs))
        w = DGVector(space, rng.standard_normal(space.total_dofs))
        c = float(rng.uniform(-3, 3))
        nv = dg_norm_discrete(space, v, 100.0)
        nw = dg_norm_discrete(space, w, 100.0)
        scaled = dg_norm_discrete(space, DGVector(space, c * v.coeffs), 100.0)
        assert_allclose(scaled, abs(c) * nv, rtol=1e-13)
        both = dg_norm_discrete(space, DGVector(space, v.coeffs + w.coeffs),
                                100.0)
        assert both <= nv + nw + 1e-12


def test_l2_dominated_by_energy_norm_mesh_independently(sine, rng):
    # random fields are jump-dominated (tiny ratio); the smooth
    # interpolant sits near the extremal ratio, which must not grow
    ratios = {}
    for n in (8, 32):
        space = space_on(n, 1)
        worst = 0.0
        for _ in range(50):
            v = DGVector(space, rng.standard_normal(space.total_dofs))
            worst = max(worst, l2_norm_discrete(space, v)
                        / dg_norm_discrete(space, v, 100.0))
        smooth = interpolate(space, sine.exact.value)
        worst = max(worst, l2_norm_discrete(space, smooth)
                    / dg_norm_discrete(space, smooth, 100.0))
        ratios[n] = worst
    drift = abs(ratios[8] - ratios[32]) / ratios[8]
    assert drift < 0.20


@pytest.mark.parametrize("r", [1, 2])
def test_projection_reproduces_linears(r):
    space = space_on(3, r)
    proj = elliptic_project(space, linear_exact(), AssemblyConfig(penalty=100.0))
    assert l2_error(space, proj, linear_exact()) <= 1e-10


def test_projection_l2_rate(sine):
    errors = []
    for n in (8, 16, 32):
        space = space_on(n, 1)
        proj = elliptic_project(space, sine.exact, AssemblyConfig(penalty=100.0))
        errors.append((1.0 / n, l2_error(space, proj, sine.exact)))
    for order in observed_orders(errors):
        assert abs(order - 2.0) <= 0.1


def test_projection_galerkin_orthogonality(sine, rng):
    space = space_on(6, 1)
    cfg = AssemblyConfig(penalty=100.0)
    a = assemble_bilinear(space, cfg)
    proj = elliptic_project(space, sine.exact, cfg, stiffness=a)
    rhs = apply_bilinear_to_field(space, sine.exact.value, sine.exact.gradient,
                                  cfg)
    gap = rhs - a @ proj.coeffs  # = a(w - P w, phi_i)
    scale = np.linalg.norm(rhs)
    for _ in range(20):
        v = rng.standard_normal(space.total_dofs)
        assert abs(float(v @ gap)) <= 1e-9 * scale * np.linalg.norm(v)


def test_projection_is_linear(sine):
    space = space_on(4, 1)
    cfg = AssemblyConfig(penalty=100.0)
    lin = linear_exact(0.4, 0.3, 0.0)
    combo = ExactSolution(
        value=lambda x, y: 2.0 * sine.exact.value(x, y) - 3.0 * lin.value(x, y),
        gradient=lambda x, y: tuple(
            2.0 * s - 3.0 * l for s, l in zip(sine.exact.gradient(x, y),
                                              lin.gradient(x, y))),
        laplacian=lambda x, y: 2.0 * sine.exact.laplacian(x, y),
    )
    p_sine = elliptic_project(space, sine.exact, cfg)
    p_lin = elliptic_project(space, lin, cfg)
    p_combo = elliptic_project(space, combo, cfg)
    assert_allclose(p_combo.coeffs, 2.0 * p_sine.coeffs - 3.0 * p_lin.coeffs,
                    atol=1e-9)


def test_observed_orders_power_law():
    levels = [(0.5 ** k, 3.0 * (0.5 ** k) ** 2) for k in range(5)]
    assert_allclose(observed_orders(levels), 2.0, atol=1e-12)


def test_observed_orders_matches_published_tables():
    # r=1 table, penalty 100: L2 column at h = 1/16 .. 1/128
    hs = [1 / 16, 1 / 32, 1 / 64, 1 / 128]
    l2 = [1.03e-3, 2.61e-4, 6.56e-5, 1.65e-5]
    got = observed_orders(list(zip(hs, l2)))
    assert_allclose(np.round(got, 2), [1.98, 1.99, 1.99])
    # r=3 table, energy column: orders print as 3.00
    dg = [1.40e-4, 1.75e-5, 2.18e-6, 2.73e-7]
    got = observed_orders(list(zip(hs, dg)))
    assert_allclose(np.round(got, 2), [3.00, 3.00, 3.00])


def test_observed_orders_validation():
    with pytest.raises(InsufficientLevels):
        observed_orders([(0.5, 1.0)])
    with pytest.raises(ValueError):
        observed_orders([(0.5, 1.0), (0.5, 0.5)])


def test_trace_constant_bounds():
    space = space_on(8, 1)
    estimate = estimate_trace_constant(space)
    assert estimate > 0
    # the constant-field ratio h_e^2 / |K| is a lower bound for the max
    mesh = space.mesh
    areas = mesh.areas()
    floor = max(edge.length ** 2 / areas[edge.plus_side[0]]
                for edge in mesh.edges)
    assert estimate >= floor - 1e-12


def test_trace_constant_mesh_independent():
    vals = [estimate_trace_constant(space_on(n, 2)) for n in (8, 32)]
    assert abs(vals[0] - vals[1]) / vals[0] < 0.10
