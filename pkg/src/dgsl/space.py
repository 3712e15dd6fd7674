"""Discontinuous piecewise-polynomial spaces and their coefficient vectors.

Degrees of freedom are nodal values on each element's principal lattice,
stored in contiguous per-element blocks: element e owns coefficients
[e*dpe, (e+1)*dpe). There is no inter-element coupling in the layout;
discontinuity is structural.
"""

from dataclasses import dataclass

import numpy as np

from .basis import edge_reference_points, make_basis
from .errors import DegenerateElement
from .mesh import Edge, TriMesh


class DGSpace:
    """Piecewise P_r space over a triangulation.

    Precomputes the per-element affine maps (Jacobians, inverses,
    determinants) and the physical coordinates of all interpolation
    nodes. Immutable after construction.
    """

    def __init__(self, mesh: TriMesh, degree: int):
        self.mesh = mesh
        self.degree = degree
        self.basis = make_basis(degree)
        self.dofs_per_element = self.basis.dim
        self.num_elements = mesh.num_triangles
        self.total_dofs = self.num_elements * self.dofs_per_element

        pts = mesh.vertices[mesh.triangles]          # (E, 3, 2)
        self.origins = pts[:, 0, :].copy()
        self.jacobians = np.stack([pts[:, 1] - pts[:, 0],
                                   pts[:, 2] - pts[:, 0]], axis=2)
        jac = self.jacobians
        self.dets = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        if np.any(self.dets <= 0.0):
            raise DegenerateElement("mesh contains a non-CCW or flat triangle")
        inv = np.empty_like(jac)
        inv[:, 0, 0] = jac[:, 1, 1]
        inv[:, 0, 1] = -jac[:, 0, 1]
        inv[:, 1, 0] = -jac[:, 1, 0]
        inv[:, 1, 1] = jac[:, 0, 0]
        self.inv_jacobians = inv / self.dets[:, None, None]

        self.node_coords = self.physical_points(self.basis.nodes)
        for arr in (self.origins, self.jacobians, self.dets,
                    self.inv_jacobians, self.node_coords):
            arr.setflags(write=False)

    def element_slice(self, element: int):
        d = self.dofs_per_element
        return slice(element * d, (element + 1) * d)

    def physical_points(self, ref_points):
        """Map reference points into every element, shape (E, npts, 2)."""
        ref = np.atleast_2d(ref_points)
        return np.einsum("eab,qb->eqa", self.jacobians, ref) + self.origins[:, None, :]


@dataclass
class DGVector:
    """Coefficient vector of a discontinuous piecewise-polynomial field."""

    space: DGSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.total_dofs,):
            raise ValueError(
                f"coefficient vector has length {self.coeffs.shape}, "
                f"space needs {self.space.total_dofs}"
            )

    def by_element(self):
        """View of the coefficients as an (E, dofs_per_element) array."""
        return self.coeffs.reshape(self.space.num_elements,
                                   self.space.dofs_per_element)

    def copy(self):
        return DGVector(self.space, self.coeffs.copy())

    @classmethod
    def zeros(cls, space):
        return cls(space, np.zeros(space.total_dofs))


def interpolate(space: DGSpace, u) -> DGVector:
    """Nodal interpolant of a scalar field u(x, y).

    The callback must broadcast over numpy arrays. Polynomials of degree
    up to the space degree are reproduced exactly; interpolating a
    globally continuous function yields (up to roundoff) matching traces
    on shared edges.
    """
    x = space.node_coords[..., 0]
    y = space.node_coords[..., 1]
    values = np.asarray(u(x, y), dtype=float)
    return DGVector(space, values.ravel().copy())


def evaluate(space: DGSpace, v: DGVector, element: int, points, gradients=False):
    """Evaluate a field on one element at reference points.

    Returns values (npts,), or (values, grads) with grads (npts, 2) in
    physical coordinates when `gradients` is set.
    """
    if not 0 <= element < space.num_elements:
        raise IndexError(f"element {element} out of range")
    coeffs = v.coeffs[space.element_slice(element)]
    vals = space.basis.values(points) @ coeffs
    if not gradients:
        return vals
    ref_g = np.einsum("pia,i->pa", space.basis.gradients(points), coeffs)
    grads = ref_g @ space.inv_jacobians[element]
    return vals, grads


def _side_trace(space, coeffs_by_elem, edge, side, flipped, params):
    tri, local = side
    ref_pts = edge_reference_points(local, params, flipped)
    c = coeffs_by_elem[tri]
    vals = space.basis.values(ref_pts) @ c
    ref_g = np.einsum("pia,i->pa", space.basis.gradients(ref_pts), c)
    grads = ref_g @ space.inv_jacobians[tri]
    return vals, grads


def edge_jump_average(space: DGSpace, v: DGVector, edge: Edge, edge_points):
    """Jump/average traces of a field on one edge.

    `edge_points` parametrize the edge from its low-index to its
    high-index endpoint. Returns a dict with:

    - ``jump_v``    (npts, 2): [v] = v_+ n_+ + v_- n_-  (v n on boundary)
    - ``avg_v``     (npts,):   {v}                       (v on boundary)
    - ``jump_grad`` (npts,):   [grad v] = (grad v_+ - grad v_-) . n_+
    - ``avg_grad``  (npts, 2): {grad v}
    """
    params = np.asarray(edge_points, dtype=float)
    by_elem = v.by_element()
    n = edge.normal
    vp, gp = _side_trace(space, by_elem, edge, edge.plus_side,
                         edge.plus_flipped, params)
    if edge.is_boundary:
        return {
            "jump_v": vp[:, None] * n[None, :],
            "avg_v": vp,
            "jump_grad": gp @ n,
            "avg_grad": gp,
        }
    vm, gm = _side_trace(space, by_elem, edge, edge.minus_side,
                         edge.minus_flipped, params)
    return {
        "jump_v": (vp - vm)[:, None] * n[None, :],
        "avg_v": 0.5 * (vp + vm),
        "jump_grad": (gp - gm) @ n,
        "avg_grad": 0.5 * (gp + gm),
    }


def edge_physical_points(mesh: TriMesh, edge: Edge, params):
    """Physical coordinates of edge points in the global direction."""
    t = np.asarray(params, dtype=float)[:, None]
    lo, hi = edge.endpoints
    return mesh.vertices[lo][None, :] * (1.0 - t) + mesh.vertices[hi][None, :] * t
