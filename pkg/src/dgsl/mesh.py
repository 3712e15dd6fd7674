"""Conforming triangulations with derived edge topology.

A mesh stores vertices, CCW-oriented triangles, and a derived list of
Edge records. Every edge is shared by one triangle (boundary) or two
(interior); a third adjacency raises NonConformingMesh. The triangle
with the lower index on an interior edge is the "plus" side and the
stored unit normal points out of it; on boundary edges the normal
points out of the domain.

Mesh file format (plain text, whitespace separated, `#` comments):

    nv nt
    x y          (nv lines)
    i j k        (nt lines, 0-based vertex indices)
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonConformingMesh, ParseError, PerturbationFoldover


@dataclass(frozen=True)
class Edge:
    """One mesh edge with its adjacency and geometry.

    ``endpoints`` is ordered (low, high) by vertex index, which fixes the
    global direction used to parametrize edge quadrature points. The
    ``*_flipped`` flags record whether each side's local edge direction
    disagrees with the global one.
    """

    endpoints: tuple
    length: float
    plus_side: tuple            # (triangle index, local edge index)
    minus_side: Optional[tuple]  # None on boundary edges
    normal: np.ndarray          # unit, points out of the plus triangle
    plus_flipped: bool
    minus_flipped: Optional[bool]

    @property
    def is_boundary(self):
        return self.minus_side is None


def _signed_area(vertices, tri):
    p0, p1, p2 = vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))


def _local_edge_vertices(tri, local_edge):
    # local edge k is opposite local vertex k, directed (k+1)%3 -> (k+2)%3
    return tri[(local_edge + 1) % 3], tri[(local_edge + 2) % 3]


def _build_edges(vertices, triangles):
    adjacency = {}
    for t, tri in enumerate(triangles):
        for k in range(3):
            a, b = _local_edge_vertices(tri, k)
            key = (a, b) if a < b else (b, a)
            adjacency.setdefault(key, []).append((t, k))

    centroids = vertices[triangles].mean(axis=1)
    edges = []
    for key in sorted(adjacency):
        sides = adjacency[key]
        if len(sides) > 2:
            raise NonConformingMesh(
                f"edge {key} is shared by {len(sides)} triangles"
            )
        lo, hi = key
        tangent = vertices[hi] - vertices[lo]
        length = float(np.hypot(*tangent))
        normal = np.array([tangent[1], -tangent[0]]) / length
        plus = sides[0]
        minus = sides[1] if len(sides) == 2 else None
        midpoint = 0.5 * (vertices[lo] + vertices[hi])
        if np.dot(normal, midpoint - centroids[plus[0]]) < 0.0:
            normal = -normal
        normal.setflags(write=False)
        if minus is not None and \
                np.dot(normal, centroids[minus[0]] - centroids[plus[0]]) <= 0.0:
            raise NonConformingMesh(
                f"triangles {plus[0]} and {minus[0]} overlap across edge {key}"
            )

        def _is_flipped(side):
            a, b = _local_edge_vertices(triangles[side[0]], side[1])
            return a != lo

        edges.append(Edge(
            endpoints=key,
            length=length,
            plus_side=plus,
            minus_side=minus,
            normal=normal,
            plus_flipped=_is_flipped(plus),
            minus_flipped=_is_flipped(minus) if minus is not None else None,
        ))
    return tuple(edges)


class TriMesh:
    """Immutable conforming triangulation of a polygonal domain.

    Parameters
    ----------
    vertices : array_like, shape (nv, 2)
    triangles : array_like, shape (nt, 3)
        Vertex index triples; re-oriented CCW if given CW.
    nominal_h : float, optional
        Mesh size used in convergence reporting. Defaults to the maximum
        element diameter; the structured generator labels meshes with 1/n
        instead.
    """

    def __init__(self, vertices, triangles, nominal_h=None):
        self.vertices = np.array(vertices, dtype=float)
        self.triangles = np.array(triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ParseError("vertices must be an (nv, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ParseError("triangles must be an (nt, 3) array")
        if self.triangles.min(initial=0) < 0 or \
                self.triangles.max(initial=-1) >= len(self.vertices):
            raise ParseError("triangle vertex index out of range")

        for t in range(len(self.triangles)):
            area = _signed_area(self.vertices, self.triangles[t])
            if area < 0.0:
                self.triangles[t, 1], self.triangles[t, 2] = \
                    self.triangles[t, 2], self.triangles[t, 1]
            elif area == 0.0:
                raise ParseError(f"triangle {t} is degenerate (zero area)")

        self.edges = _build_edges(self.vertices, self.triangles)

        tri_pts = self.vertices[self.triangles]
        side = np.stack([
            tri_pts[:, 1] - tri_pts[:, 0],
            tri_pts[:, 2] - tri_pts[:, 1],
            tri_pts[:, 0] - tri_pts[:, 2],
        ])
        self.element_sizes = np.sqrt((side ** 2).sum(axis=2)).max(axis=0)
        self.h_max = float(self.element_sizes.max())
        self.nominal_h = float(nominal_h) if nominal_h is not None else self.h_max

        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        self.element_sizes.setflags(write=False)

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_triangles(self):
        return len(self.triangles)

    def interior_edges(self):
        return [e for e in self.edges if not e.is_boundary]

    def boundary_edges(self):
        return [e for e in self.edges if e.is_boundary]

    def areas(self):
        """Signed areas of all triangles (positive by construction)."""
        p = self.vertices[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))

    def total_area(self):
        return float(self.areas().sum())


def edge_topology(mesh: TriMesh):
    """Edge records of a mesh (derived at construction)."""
    return list(mesh.edges)


def build_structured(n: int) -> TriMesh:
    """Uniform unit-square mesh: n x n cells, each split along the
    lower-left to upper-right diagonal.

    (n+1)^2 vertices, 2*n^2 triangles, labeled with nominal size 1/n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    coords = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(coords, coords)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    t = 0
    for j in range(n):
        for i in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            triangles[t] = (a, b, c)
            triangles[t + 1] = (a, c, d)
            t += 2
    return TriMesh(vertices, triangles, nominal_h=1.0 / n)


def build_perturbed(n: int, amplitude: float, seed: int) -> TriMesh:
    """Structured mesh with interior vertices randomly displaced.

    Each interior vertex moves by a uniform offset in
    [-amplitude/n, amplitude/n] per coordinate, drawn from a seeded
    generator; boundary vertices stay fixed and connectivity is
    unchanged. Raises PerturbationFoldover if any triangle folds.
    """
    if not 0.0 <= amplitude <= 0.3:
        raise ValueError(f"amplitude must be in [0, 0.3], got {amplitude}")
    base = build_structured(n)
    vertices = base.vertices.copy()
    interior = np.array([
        j * (n + 1) + i
        for j in range(1, n)
        for i in range(1, n)
    ], dtype=np.int64)
    rng = np.random.default_rng(seed)
    if len(interior):
        offsets = rng.uniform(-amplitude / n, amplitude / n, size=(len(interior), 2))
        vertices[interior] += offsets

    for t, tri in enumerate(base.triangles):
        if _signed_area(vertices, tri) <= 0.0:
            raise PerturbationFoldover(
                f"triangle {t} folded at amplitude {amplitude} (seed {seed})"
            )
    mesh = TriMesh(vertices, base.triangles)
    return mesh


def import_mesh(text: str) -> TriMesh:
    """Parse mesh-file content into a TriMesh.

    CW triangles are re-oriented; an edge shared by more than two
    triangles raises NonConformingMesh.
    """
    tokensets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            tokensets.append((lineno, line.split()))

    if not tokensets:
        raise ParseError("empty mesh file")

    lineno, header = tokensets[0]
    if len(header) != 2:
        raise ParseError(f"line {lineno}: expected 'nv nt' header")
    try:
        nv, nt = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ParseError(f"line {lineno}: non-integer header") from exc
    if nv < 3 or nt < 1:
        raise ParseError(f"line {lineno}: need at least 3 vertices and 1 triangle")
    if len(tokensets) != 1 + nv + nt:
        raise ParseError(
            f"expected {1 + nv + nt} content lines, found {len(tokensets)}"
        )

    vertices = np.empty((nv, 2))
    for row, (lineno, toks) in enumerate(tokensets[1:1 + nv]):
        if len(toks) != 2:
            raise ParseError(f"line {lineno}: expected 'x y'")
        try:
            vertices[row] = (float(toks[0]), float(toks[1]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad coordinate") from exc

    triangles = np.empty((nt, 3), dtype=np.int64)
    for row, (lineno, toks) in enumerate(tokensets[1 + nv:]):
        if len(toks) != 3:
            raise ParseError(f"line {lineno}: expected 'i j k'")
        try:
            triangles[row] = (int(toks[0]), int(toks[1]), int(toks[2]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad vertex index") from exc
        if triangles[row].min() < 0 or triangles[row].max() >= nv:
            raise ParseError(f"line {lineno}: vertex index out of range")

    return TriMesh(vertices, triangles)


def export_mesh(mesh: TriMesh) -> str:
    """Serialize a mesh in the import format, round-trip exact."""
    lines = [f"{mesh.num_vertices} {mesh.num_triangles}"]
    for x, y in mesh.vertices:
        lines.append(f"{float(x)!r} {float(y)!r}")
    for i, j, k in mesh.triangles:
        lines.append(f"{i} {j} {k}")
    return "\n".join(lines) + "\n"
