"""Assembly of the interior penalty bilinear form, residuals and Jacobians.

The bilinear form is

    a(w, v) = sum_K (grad w, grad v)_K
            - sum_e int_e {grad w} . [v]
            - sum_e int_e {grad v} . [w]
            + sum_e int_e (penalty / h_e) [w] . [v]

summed over all edges, with boundary-edge jumps [v] = v n and averages
{grad v} = grad v. Edges are visited once each, writing the 2x2 block
pattern of their two adjacent elements, so no term is double counted.

Element integrals reduce to combinations of reference-element tensors
contracted with per-element Jacobian data, which keeps assembly loops
short. Edge integrals use trace tables precomputed for the six
(local edge, orientation) combinations.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from .basis import edge_reference_points
from .quadrature import edge_rule, triangle_rule
from .space import DGSpace, DGVector


@dataclass(frozen=True)
class AssemblyConfig:
    """Penalty parameter and quadrature degrees for operator assembly.

    `volume_degree` defaults to 3r+1 (the cubic nonlinearity is
    under-integrated by design at a configurable degree) and
    `edge_degree` to 2r+2, which is exact for every polynomial edge
    integrand in the bilinear form.
    """

    penalty: float
    volume_degree: Optional[int] = None
    edge_degree: Optional[int] = None

    def __post_init__(self):
        if not self.penalty > 0.0:
            raise ValueError(f"penalty must be positive, got {self.penalty}")

    def resolved_volume_degree(self, r):
        return self.volume_degree if self.volume_degree is not None else 3 * r + 1

    def resolved_edge_degree(self, r):
        return self.edge_degree if self.edge_degree is not None else 2 * r + 2


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric sparse operator in compressed sparse row storage."""

    csr: sparse.csr_matrix

    @property
    def dim(self):
        return self.csr.shape[0]

    @property
    def row_offsets(self):
        return self.csr.indptr

    @property
    def col_indices(self):
        return self.csr.indices

    @property
    def values(self):
        return self.csr.data

    def __matmul__(self, x):
        return self.csr @ x

    def __add__(self, other):
        return SparseSymMatrix(sparse.csr_matrix(self.csr + other.csr))

    def __sub__(self, other):
        return SparseSymMatrix(sparse.csr_matrix(self.csr - other.csr))

    def toarray(self):
        return self.csr.toarray()

    def max_asymmetry(self):
        """max |A - A^T| over all entries (0 for an empty matrix)."""
        diff = (self.csr - self.csr.T).tocoo()
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def max_abs(self):
        return float(np.abs(self.csr.data).max()) if self.csr.nnz else 0.0


class _VolumeTables:
    """Reference tables for element integrals at one quadrature degree."""

    def __init__(self, basis, degree):
        self.rule = triangle_rule(degree)
        self.values = basis.values(self.rule.points)          # (Q, D)
        self.gradients = basis.gradients(self.rule.points)    # (Q, D, 2)
        w = self.rule.weights
        # stiff_ref[a, b] = sum_q w_q ghat[q,:,a] ghat[q,:,b]^T
        self.stiff_ref = np.einsum("q,qia,qjb->abij", w,
                                   self.gradients, self.gradients)


class _EdgeTables:
    """Trace tables and pair tensors for edge integrals.

    For test side t and trial side s (each a (local_edge, flipped)
    combination c):

    - pen[ct][cs][i, j]     = sum_q w_q V_t[q,i] V_s[q,j]
    - grad_pair[ct][cs][i, j, a] = sum_q w_q V_t[q,i] Ghat_s[q,j,a]

    so that sum_q w_q V_t[q,i] (grad_s phi_j . n) is grad_pair
    contracted with invJ_s @ n.
    """

    def __init__(self, basis, degree):
        self.rule = edge_rule(degree)
        t = self.rule.points
        w = self.rule.weights
        self.values = {}
        self.grads = {}
        for k in range(3):
            for fl in (False, True):
                pts = edge_reference_points(k, t, fl)
                self.values[(k, fl)] = basis.values(pts)
                self.grads[(k, fl)] = basis.gradients(pts)
        combos = list(self.values)
        self.pen = {
            (ct, cs): np.einsum("q,qi,qj->ij", w, self.values[ct], self.values[cs])
            for ct in combos for cs in combos
        }
        self.grad_pair = {
            (ct, cs): np.einsum("q,qi,qja->ija", w, self.values[ct], self.grads[cs])
            for ct in combos for cs in combos
        }


_TABLE_CACHE = {}


def _tables(basis, volume_degree, edge_degree):
    key = (basis.degree, volume_degree, edge_degree)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = (_VolumeTables(basis, volume_degree),
                             _EdgeTables(basis, edge_degree))
    return _TABLE_CACHE[key]


def _edge_sides(space, edge):
    """Per-side data for one edge: (combo key, triangle, sign)."""
    sides = [((edge.plus_side[1], edge.plus_flipped), edge.plus_side[0], 1.0)]
    if not edge.is_boundary:
        sides.append(((edge.minus_side[1], edge.minus_flipped),
                      edge.minus_side[0], -1.0))
    return sides


def _scatter_blocks(space, blocks, rows0, cols0, extra=()):
    """COO triplets from a list of dense (D, D) blocks plus extra arrays."""
    d = space.dofs_per_element
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    data = [np.asarray(blocks).reshape(-1, d, d)] if blocks else []
    rows = [np.asarray(rows0, dtype=np.int64)[:, None, None] + ii[None]] if blocks else []
    cols = [np.asarray(cols0, dtype=np.int64)[:, None, None] + jj[None]] if blocks else []
    for r, c, v in extra:
        rows.append(r)
        cols.append(c)
        data.append(v)
    n = space.total_dofs
    coo = sparse.coo_matrix(
        (np.concatenate([d.ravel() for d in data]),
         (np.concatenate([r.ravel() for r in rows]),
          np.concatenate([c.ravel() for c in cols]))),
        shape=(n, n),
    )
    return SparseSymMatrix(sparse.csr_matrix(coo))


def _volume_stiffness_blocks(space, vol):
    # grad phi_i . grad phi_j contracts the reference tensor with
    # invJ invJ^T per element; det converts reference to physical measure.
    metric = np.einsum("eab,ecb->eac", space.inv_jacobians, space.inv_jacobians)
    return np.einsum("e,eab,abij->eij", space.dets, metric, vol.stiff_ref)


def _element_offsets(space):
    return np.arange(space.num_elements, dtype=np.int64) * space.dofs_per_element


def assemble_bilinear(space: DGSpace, cfg: AssemblyConfig) -> SparseSymMatrix:
    """Assemble the full interior penalty operator."""
    r = space.degree
    vol, etab = _tables(space.basis, cfg.resolved_volume_degree(r),
                        cfg.resolved_edge_degree(r))
    lam = cfg.penalty

    offs = _element_offsets(space)
    d = space.dofs_per_element
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    vol_blocks = _volume_stiffness_blocks(space, vol)
    vol_rows = offs[:, None, None] + ii[None]
    vol_cols = offs[:, None, None] + jj[None]

    blocks, rows0, cols0 = [], [], []
    for edge in space.mesh.edges:
        n = edge.normal
        h_e = edge.length
        sides = _edge_sides(space, edge)
        bn = {combo: space.inv_jacobians[tri] @ n for combo, tri, _ in sides}
        half = 0.5 if not edge.is_boundary else 1.0
        for ct, tri_t, sig_t in sides:
            for cs, tri_s, sig_s in sides:
                flux_ts = np.einsum("ija,a->ij", etab.grad_pair[(ct, cs)], bn[cs])
                flux_st = np.einsum("ija,a->ij", etab.grad_pair[(cs, ct)], bn[ct])
                block = (-half * h_e * sig_t) * flux_ts \
                    + (-half * h_e * sig_s) * flux_st.T \
                    + (lam * sig_t * sig_s) * etab.pen[(ct, cs)]
                blocks.append(block)
                rows0.append(offs[tri_t])
                cols0.append(offs[tri_s])

    return _scatter_blocks(space, blocks, rows0, cols0,
                           extra=[(vol_rows, vol_cols, vol_blocks)])


def assemble_penalty(space: DGSpace, cfg: AssemblyConfig) -> SparseSymMatrix:
    """Assemble only the (penalty / h_e) [w].[v] jump term."""
    r = space.degree
    _, etab = _tables(space.basis, cfg.resolved_volume_degree(r),
                      cfg.resolved_edge_degree(r))
    offs = _element_offsets(space)
    blocks, rows0, cols0 = [], [], []
    for edge in space.mesh.edges:
        sides = _edge_sides(space, edge)
        for ct, tri_t, sig_t in sides:
            for cs, tri_s, sig_s in sides:
                blocks.append((cfg.penalty * sig_t * sig_s) * etab.pen[(ct, cs)])
                rows0.append(offs[tri_t])
                cols0.append(offs[tri_s])
    return _scatter_blocks(space, blocks, rows0, cols0)


def element_point_values(space: DGSpace, v: DGVector, values_table):
    """Field values at the table's quadrature points, shape (E, Q)."""
    return np.einsum("ed,qd->eq", v.by_element(), values_table)


def assemble_weighted_mass(space: DGSpace, weight, cfg: AssemblyConfig,
                           at_field: Optional[DGVector] = None) -> SparseSymMatrix:
    """Mass matrix with pointwise weight.

    `weight` is either weight(x, y) or, when `at_field` is given,
    weight(u(x, y)) evaluated at that field's quadrature-point values.
    """
    r = space.degree
    vol, _ = _tables(space.basis, cfg.resolved_volume_degree(r),
                     cfg.resolved_edge_degree(r))
    pts = space.physical_points(vol.rule.points)
    if at_field is not None:
        wvals = np.asarray(weight(element_point_values(space, at_field,
                                                       vol.values)), dtype=float)
    else:
        wvals = np.asarray(weight(pts[..., 0], pts[..., 1]), dtype=float)
    wvals = np.broadcast_to(wvals, pts.shape[:2])
    scaled = space.dets[:, None] * vol.rule.weights[None, :] * wvals
    blocks = np.einsum("eq,qi,qj->eij", scaled, vol.values, vol.values)
    offs = _element_offsets(space)
    d = space.dofs_per_element
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return _scatter_blocks(space, [], [], [], extra=[(
        offs[:, None, None] + ii[None],
        offs[:, None, None] + jj[None],
        blocks,
    )])


def assemble_load(space: DGSpace, f, cfg: AssemblyConfig) -> np.ndarray:
    """Load vector int_K f phi_i for a broadcastable source f(x, y)."""
    r = space.degree
    vol, _ = _tables(space.basis, cfg.resolved_volume_degree(r),
                     cfg.resolved_edge_degree(r))
    pts = space.physical_points(vol.rule.points)
    fvals = np.broadcast_to(np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float),
                            pts.shape[:2])
    scaled = space.dets[:, None] * vol.rule.weights[None, :] * fvals
    return np.einsum("eq,qi->ei", scaled, vol.values).ravel()


def _nonlinear_load(space, u, problem, cfg):
    """int_K (g(x) - N(u_h)) phi_i, i.e. the f(x, u_h) pairing."""
    r = space.degree
    vol, _ = _tables(space.basis, cfg.resolved_volume_degree(r),
                     cfg.resolved_edge_degree(r))
    pts = space.physical_points(vol.rule.points)
    uvals = element_point_values(space, u, vol.values)
    fvals = np.broadcast_to(
        np.asarray(problem.source(pts[..., 0], pts[..., 1]), dtype=float),
        uvals.shape,
    ) - problem.nonlinearity(uvals)
    scaled = space.dets[:, None] * vol.rule.weights[None, :] * fvals
    return np.einsum("eq,qi->ei", scaled, vol.values).ravel()


def assemble_residual(space: DGSpace, u: DGVector, problem,
                      cfg: AssemblyConfig,
                      stiffness: Optional[SparseSymMatrix] = None) -> np.ndarray:
    """Residual a(u_h, phi_i) - (f(., u_h), phi_i); zero at the discrete
    solution up to solver tolerance."""
    a = stiffness if stiffness is not None else assemble_bilinear(space, cfg)
    return a @ u.coeffs - _nonlinear_load(space, u, problem, cfg)


def assemble_jacobian(space: DGSpace, u: DGVector, problem,
                      cfg: AssemblyConfig,
                      stiffness: Optional[SparseSymMatrix] = None) -> SparseSymMatrix:
    """Newton Jacobian: the bilinear operator plus the mass matrix
    weighted with N'(u_h) (= -f_u, nonnegative under the sign assumption)."""
    a = stiffness if stiffness is not None else assemble_bilinear(space, cfg)
    mass = assemble_weighted_mass(space, problem.d_nonlinearity, cfg, at_field=u)
    return a + mass
