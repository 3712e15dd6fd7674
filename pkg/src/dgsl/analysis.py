"""Error norms, the energy projection, observed orders, and the oracles
used by the structural property tests.

The mesh-dependent norm is

    |||w|||^2 = sum_K ||grad w||_{0,K}^2
              + sum_e (h_e / penalty) ||{grad w}||_{0,e}^2
              + sum_e (penalty / h_e) ||[w]||_{0,e}^2

over all edges. For the error w = u - u_h of a smooth u the interior
jumps of u vanish, so [w] reduces to -[u_h] inside and (u - u_h) n on
the boundary. Norm quadrature runs at degree 2r+4 so its error stays
far below discretization error at every refinement level.
"""

from typing import Optional

import numpy as np
from scipy.linalg import eigh

from .assembly import (AssemblyConfig, SparseSymMatrix, _tables,
                       _volume_stiffness_blocks, assemble_bilinear)
from .basis import edge_reference_points
from .errors import InsufficientLevels
from .linear_solver import solve_spd
from .problems import ExactSolution
from .quadrature import edge_rule, triangle_rule
from .space import (DGSpace, DGVector, _side_trace, edge_jump_average,
                    edge_physical_points)


def _analysis_degree(space):
    return 2 * space.degree + 4


def _field_values_and_gradients(space, v, rule, basis_values, basis_gradients):
    coeffs = v.by_element()
    vals = np.einsum("ed,qd->eq", coeffs, basis_values)
    ref_g = np.einsum("ed,qda->eqa", coeffs, basis_gradients)
    grads = np.einsum("eqa,eab->eqb", ref_g, space.inv_jacobians)
    return vals, grads


def l2_error(space: DGSpace, v: DGVector, exact: ExactSolution,
             quad_degree: Optional[int] = None) -> float:
    """Broken L2 distance between a field and an exact solution."""
    degree = quad_degree if quad_degree is not None else _analysis_degree(space)
    rule = triangle_rule(degree)
    btab = space.basis.values(rule.points)
    pts = space.physical_points(rule.points)
    vals = np.einsum("ed,qd->eq", v.by_element(), btab)
    diff = exact.value(pts[..., 0], pts[..., 1]) - vals
    total = np.einsum("e,q,eq->", space.dets, rule.weights, diff ** 2)
    return float(np.sqrt(total))


def l2_norm_discrete(space: DGSpace, v: DGVector,
                     quad_degree: Optional[int] = None) -> float:
    """Broken L2 norm of a discrete field (exact at degree 2r)."""
    degree = quad_degree if quad_degree is not None else 2 * space.degree + 2
    rule = triangle_rule(degree)
    vals = np.einsum("ed,qd->eq", v.by_element(), space.basis.values(rule.points))
    return float(np.sqrt(np.einsum("e,q,eq->", space.dets,
                                   rule.weights, vals ** 2)))


def _edge_error_terms(space, v, exact, penalty, edge_degree):
    """Average-gradient and jump contributions of the error norm."""
    rule = edge_rule(edge_degree)
    avg_term = 0.0
    jump_term = 0.0
    for edge in space.mesh.edges:
        tr = edge_jump_average(space, v, edge, rule.points)
        h_e = edge.length
        if exact is not None:
            pts = edge_physical_points(space.mesh, edge, rule.points)
            gx, gy = exact.gradient(pts[:, 0], pts[:, 1])
            avg = np.column_stack([gx, gy]) - tr["avg_grad"]
            if edge.is_boundary:
                jump = exact.value(pts[:, 0], pts[:, 1]) - tr["avg_v"]
            else:
                jump = -np.einsum("qa,a->q", tr["jump_v"], edge.normal)
        else:
            avg = tr["avg_grad"]
            jump = np.einsum("qa,a->q", tr["jump_v"], edge.normal)
        avg_term += (h_e ** 2 / penalty) * float(
            rule.weights @ (avg ** 2).sum(axis=1))
        jump_term += penalty * float(rule.weights @ jump ** 2)
    return avg_term, jump_term


def dg_error(space: DGSpace, v: DGVector, exact: ExactSolution, penalty: float,
             volume_degree: Optional[int] = None,
             edge_degree: Optional[int] = None) -> float:
    """Mesh-dependent norm of u - v_h, using the analytic gradient of u."""
    vdeg = volume_degree if volume_degree is not None else _analysis_degree(space)
    edeg = edge_degree if edge_degree is not None else _analysis_degree(space)
    rule = triangle_rule(vdeg)
    vals, grads = _field_values_and_gradients(
        space, v, rule, space.basis.values(rule.points),
        space.basis.gradients(rule.points))
    pts = space.physical_points(rule.points)
    gx, gy = exact.gradient(pts[..., 0], pts[..., 1])
    diff = np.stack([gx, gy], axis=-1) - grads
    vol = np.einsum("e,q,eqa->", space.dets, rule.weights, diff ** 2)
    avg, jump = _edge_error_terms(space, v, exact, penalty, edeg)
    return float(np.sqrt(vol + avg + jump))


def dg_norm_discrete(space: DGSpace, v: DGVector, penalty: float,
                     volume_degree: Optional[int] = None,
                     edge_degree: Optional[int] = None) -> float:
    """Mesh-dependent norm of a discrete field."""
    vdeg = volume_degree if volume_degree is not None else _analysis_degree(space)
    edeg = edge_degree if edge_degree is not None else _analysis_degree(space)
    rule = triangle_rule(vdeg)
    _, grads = _field_values_and_gradients(
        space, v, rule, space.basis.values(rule.points),
        space.basis.gradients(rule.points))
    vol = np.einsum("e,q,eqa->", space.dets, rule.weights, grads ** 2)
    avg, jump = _edge_error_terms(space, v, None, penalty, edeg)
    return float(np.sqrt(vol + avg + jump))


def apply_bilinear_to_field(space: DGSpace, value_fn, grad_fn,
                            cfg: AssemblyConfig,
                            quad_degree: Optional[int] = None) -> np.ndarray:
    """The functional a(w, phi_i) for a smooth field w given analytically.

    Interior jumps of w vanish; boundary edges keep the full set of
    terms so that fields with nonzero boundary trace (e.g. global
    linears) are handled exactly.
    """
    degree = quad_degree if quad_degree is not None else _analysis_degree(space)
    rule = triangle_rule(degree)
    gtab = space.basis.gradients(rule.points)
    pts = space.physical_points(rule.points)
    gx, gy = grad_fn(pts[..., 0], pts[..., 1])
    gw = np.stack([np.broadcast_to(gx, pts.shape[:2]),
                   np.broadcast_to(gy, pts.shape[:2])], axis=-1)
    phys_g = np.einsum("qia,eab->eqib", gtab, space.inv_jacobians)
    out = np.einsum("e,q,eqa,eqia->ei", space.dets, rule.weights, gw, phys_g)
    out = out.ravel().copy()

    erule = edge_rule(degree if degree <= 20 else 20)
    d = space.dofs_per_element
    for edge in space.mesh.edges:
        n = edge.normal
        h_e = edge.length
        epts = edge_physical_points(space.mesh, edge, erule.points)
        egx, egy = grad_fn(epts[:, 0], epts[:, 1])
        gw_n = np.broadcast_to(egx, erule.points.shape) * n[0] \
            + np.broadcast_to(egy, erule.points.shape) * n[1]
        sides = [(edge.plus_side, edge.plus_flipped, 1.0)]
        if not edge.is_boundary:
            sides.append((edge.minus_side, edge.minus_flipped, -1.0))
        for (tri, local), flipped, sign in sides:
            ref = edge_reference_points(local, erule.points, flipped)
            vtab = space.basis.values(ref)
            block = slice(tri * d, (tri + 1) * d)
            out[block] -= sign * h_e * np.einsum(
                "q,q,qi->i", erule.weights, gw_n, vtab)
            if edge.is_boundary:
                wvals = np.broadcast_to(
                    np.asarray(value_fn(epts[:, 0], epts[:, 1]), dtype=float),
                    erule.points.shape)
                bn = space.inv_jacobians[tri] @ n
                ntab = np.einsum("qia,a->qi", space.basis.gradients(ref), bn)
                out[block] -= h_e * np.einsum("q,q,qi->i",
                                              erule.weights, wvals, ntab)
                out[block] += cfg.penalty * np.einsum(
                    "q,q,qi->i", erule.weights, wvals, vtab)
    return out


def laplacian_pairing(space: DGSpace, exact: ExactSolution,
                      quad_degree: Optional[int] = None) -> np.ndarray:
    """The functional (-Delta w, phi_i) by element quadrature."""
    degree = quad_degree if quad_degree is not None else _analysis_degree(space)
    rule = triangle_rule(degree)
    vtab = space.basis.values(rule.points)
    pts = space.physical_points(rule.points)
    fvals = -np.asarray(exact.laplacian(pts[..., 0], pts[..., 1]), dtype=float)
    scaled = space.dets[:, None] * rule.weights[None, :] * fvals
    return np.einsum("eq,qi->ei", scaled, vtab).ravel()


def elliptic_project(space: DGSpace, exact: ExactSolution,
                     cfg: AssemblyConfig,
                     stiffness: Optional[SparseSymMatrix] = None) -> DGVector:
    """Energy projection: the discrete field with a(P w, v) = a(w, v)."""
    a = stiffness if stiffness is not None else assemble_bilinear(space, cfg)
    rhs = apply_bilinear_to_field(space, exact.value, exact.gradient, cfg)
    x, _ = solve_spd(a, rhs, tol=1e-12, method="direct")
    return DGVector(space, x)


def observed_orders(levels) -> list:
    """Orders log(e_prev/e_i) / log(h_prev/h_i) between consecutive levels.

    `levels` is a sequence of (h, error) pairs with strictly decreasing h.
    """
    pairs = list(levels)
    if len(pairs) < 2:
        raise InsufficientLevels("need at least two refinement levels")
    hs = [float(h) for h, _ in pairs]
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("mesh sizes must be strictly decreasing")
    orders = []
    for (h1, e1), (h2, e2) in zip(pairs, pairs[1:]):
        orders.append(float(np.log(e1 / e2) / np.log(h1 / h2)))
    return orders


def estimate_trace_constant(space: DGSpace,
                            edge_degree: Optional[int] = None) -> float:
    """Sharpest constant in ||v||_{0,e}^2 <= C (h_e^{-1} ||v||_{0,K}^2
    + h_e |v|_{1,K}^2) over all (edge, adjacent element) pairs.

    Computed exactly per pair as the largest generalized eigenvalue of
    the edge mass matrix against the scaled element mass + stiffness,
    which dominates any sampled discrete field.
    """
    r = space.degree
    edeg = edge_degree if edge_degree is not None else 2 * r + 2
    erule = edge_rule(edeg)
    vrule = triangle_rule(2 * r + 2)
    vtab = space.basis.values(vrule.points)
    mass_ref = np.einsum("q,qi,qj->ij", vrule.weights, vtab, vtab)
    vol = _tables(space.basis, 2 * r + 2, edeg)[0]
    stiff = _volume_stiffness_blocks(space, vol)

    worst = 0.0
    for edge in space.mesh.edges:
        h_e = edge.length
        sides = [(edge.plus_side, edge.plus_flipped)]
        if not edge.is_boundary:
            sides.append((edge.minus_side, edge.minus_flipped))
        for (tri, local), flipped in sides:
            ref = edge_reference_points(local, erule.points, flipped)
            tv = space.basis.values(ref)
            edge_mass = h_e * np.einsum("q,qi,qj->ij", erule.weights, tv, tv)
            elem_mass = space.dets[tri] * mass_ref
            denom = elem_mass / h_e + h_e * stiff[tri]
            top = eigh(edge_mass, denom, eigvals_only=True)[-1]
            worst = max(worst, float(top))
    return worst


def edge_identity_residual(space: DGSpace, v: DGVector, w1: DGVector,
                           w2: DGVector, edge_degree: Optional[int] = None) -> float:
    """Relative mismatch of the element-boundary / edge-sum identity.

    Checks sum_K int_{dK} v w.n against sum_e int_e {w}.[v] plus the
    interior-edge sum of int_e {v}[w] for a scalar field v and a vector
    field w = (w1, w2).
    """
    edeg = edge_degree if edge_degree is not None else 2 * space.degree + 2
    rule = edge_rule(edeg)
    by_v = v.by_element()
    by_w1 = w1.by_element()
    by_w2 = w2.by_element()
    lhs = 0.0
    rhs = 0.0
    for edge in space.mesh.edges:
        n = edge.normal
        h_e = edge.length
        vp, _ = _side_trace(space, by_v, edge, edge.plus_side,
                            edge.plus_flipped, rule.points)
        w1p, _ = _side_trace(space, by_w1, edge, edge.plus_side,
                             edge.plus_flipped, rule.points)
        w2p, _ = _side_trace(space, by_w2, edge, edge.plus_side,
                             edge.plus_flipped, rule.points)
        wp_n = w1p * n[0] + w2p * n[1]
        if edge.is_boundary:
            lhs += h_e * float(rule.weights @ (vp * wp_n))
            rhs += h_e * float(rule.weights @ (wp_n * vp))
            continue
        vm, _ = _side_trace(space, by_v, edge, edge.minus_side,
                            edge.minus_flipped, rule.points)
        w1m, _ = _side_trace(space, by_w1, edge, edge.minus_side,
                             edge.minus_flipped, rule.points)
        w2m, _ = _side_trace(space, by_w2, edge, edge.minus_side,
                             edge.minus_flipped, rule.points)
        wm_n = w1m * n[0] + w2m * n[1]
        lhs += h_e * float(rule.weights @ (vp * wp_n - vm * wm_n))
        avg_w_jump_v = 0.5 * (wp_n + wm_n) * (vp - vm)
        avg_v_jump_w = 0.5 * (vp + vm) * (wp_n - wm_n)
        rhs += h_e * float(rule.weights @ (avg_w_jump_v + avg_v_jump_w))
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale
