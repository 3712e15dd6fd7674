"""Nodal Lagrange bases on the reference triangle and affine element maps.

The reference triangle has vertices (0,0), (1,0), (0,1). Basis functions
are Lagrange polynomials on the principal lattice of degree r, built by
inverting the monomial Vandermonde matrix at the lattice nodes. Local
edge k is the edge opposite reference vertex k, directed from vertex
(k+1) % 3 to vertex (k+2) % 3.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateElement, UnsupportedDegree

REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

SUPPORTED_DEGREES = (1, 2, 3)


def _lattice_nodes(r):
    nodes = []
    for j in range(r + 1):
        for i in range(r + 1 - j):
            nodes.append((i / r, j / r))
    return np.array(nodes)


def _monomial_exponents(r):
    return [(a, b) for b in range(r + 1) for a in range(r + 1 - b)]


def _monomial_values(exponents, points):
    pts = np.atleast_2d(points)
    cols = [pts[:, 0] ** a * pts[:, 1] ** b for a, b in exponents]
    return np.column_stack(cols)


def _monomial_gradients(exponents, points):
    pts = np.atleast_2d(points)
    x, y = pts[:, 0], pts[:, 1]
    grads = np.zeros((len(pts), len(exponents), 2))
    for k, (a, b) in enumerate(exponents):
        if a > 0:
            grads[:, k, 0] = a * x ** (a - 1) * y ** b
        if b > 0:
            grads[:, k, 1] = b * x ** a * y ** (b - 1)
    return grads


class ReferenceBasis:
    """Lagrange basis of degree r on the reference triangle.

    Attributes
    ----------
    degree : int
    nodes : ndarray, shape (dim, 2)
        Principal lattice nodes; for r = 1 these are the vertices.
    dim : int
        (r+1)(r+2)/2 basis functions.
    """

    def __init__(self, degree):
        if degree not in SUPPORTED_DEGREES:
            raise UnsupportedDegree(
                f"bases cover degrees {SUPPORTED_DEGREES}, got {degree}"
            )
        self.degree = degree
        self.nodes = _lattice_nodes(degree)
        self.dim = len(self.nodes)
        self._exponents = _monomial_exponents(degree)
        vand = _monomial_values(self._exponents, self.nodes)
        # phi_i = sum_k coeffs[i, k] * monomial_k, with phi_i(node_j) = delta_ij
        self._coeffs = np.linalg.inv(vand).T
        self.nodes.setflags(write=False)

    def values(self, points):
        """Basis values at reference points, shape (npts, dim)."""
        return _monomial_values(self._exponents, points) @ self._coeffs.T

    def gradients(self, points):
        """Reference-frame gradients at reference points, shape (npts, dim, 2)."""
        mg = _monomial_gradients(self._exponents, points)
        return np.einsum("pka,ik->pia", mg, self._coeffs)


def make_basis(r: int) -> ReferenceBasis:
    """Build the degree-r nodal basis (r in {1, 2, 3})."""
    return ReferenceBasis(r)


@dataclass(frozen=True)
class AffineMap:
    """Affine map x = jacobian @ xi + translation from the reference triangle.

    ``det`` is twice the element area and must be positive (CCW vertices).
    """

    jacobian: np.ndarray
    translation: np.ndarray
    det: float
    inv_transpose: np.ndarray

    @classmethod
    def from_vertices(cls, p0, p1, p2):
        jac = np.column_stack([np.asarray(p1) - p0, np.asarray(p2) - p0])
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if det <= 0.0:
            raise DegenerateElement(f"non-positive Jacobian determinant {det}")
        inv = np.array([[jac[1, 1], -jac[0, 1]], [-jac[1, 0], jac[0, 0]]]) / det
        return cls(jac, np.asarray(p0, dtype=float), det, inv.T.copy())

    def apply(self, points):
        """Map reference points (npts, 2) to physical coordinates."""
        return np.atleast_2d(points) @ self.jacobian.T + self.translation


def physical_gradients(basis: ReferenceBasis, amap: AffineMap, points):
    """Gradients of all basis functions in physical coordinates.

    Returns shape (npts, dim, 2); each gradient is J^{-T} times the
    reference gradient.
    """
    if amap.det <= 0.0:
        raise DegenerateElement("affine map has non-positive determinant")
    return basis.gradients(points) @ amap.inv_transpose.T


def edge_reference_points(local_edge: int, params, flipped: bool = False):
    """Reference coordinates of points on a local edge.

    `params` are values in [0, 1] along the edge's own direction
    (from local vertex (k+1)%3 to (k+2)%3); `flipped=True` traverses the
    edge the opposite way, which reconciles the two sides of a shared
    edge when their local directions disagree.
    """
    t = np.asarray(params, dtype=float)
    if flipped:
        t = 1.0 - t
    a = REF_VERTICES[(local_edge + 1) % 3]
    b = REF_VERTICES[(local_edge + 2) % 3]
    return a[None, :] + t[:, None] * (b - a)[None, :]


def trace_table(basis: ReferenceBasis, local_edge: int, edge_points, flipped=False):
    """Values and reference gradients of the basis along one local edge.

    Returns (values, gradients) with shapes (npts, dim) and (npts, dim, 2).
    """
    pts = edge_reference_points(local_edge, edge_points, flipped)
    return basis.values(pts), basis.gradients(pts)
