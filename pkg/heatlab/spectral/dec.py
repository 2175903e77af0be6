"""Discrete exterior calculus on closed oriented triangle meshes.

Incidence matrices d0 (edges x vertices) and d1 (faces x edges) are exact
integers; Hodge stars are diagonal circumcentric weights. Laplacians are kept in
weak form (stiffness K, diagonal mass M) so every eigenproblem is K v = mu M v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from heatlab.errors import MeshError


@dataclass
class MeshComplex:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3) consistently oriented
    edges: np.ndarray  # (E, 2) oriented low -> high
    d0: sparse.csr_matrix
    d1: sparse.csr_matrix
    star0: np.ndarray  # circumcentric dual areas
    star1: np.ndarray  # dual / primal edge length ratios
    star2: np.ndarray  # 1 / face area

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.faces)

    def mass(self, j: int) -> np.ndarray:
        return (self.star0, self.star1, self.star2)[j]


@dataclass
class DecOperator:
    """Weak-form Hodge Laplacian on j-cochains."""
    degree: int
    stiffness: sparse.csr_matrix
    mass: np.ndarray

    def dense(self) -> np.ndarray:
        """Symmetric operator M^{-1/2} K M^{-1/2}."""
        s = 1.0 / np.sqrt(self.mass)
        return s[:, None] * self.stiffness.toarray() * s[None, :]


def _cotangents(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """cot of the angle at each corner, (F, 3); corner c is opposite edge (c+1, c+2)."""
    out = np.empty(faces.shape)
    for c in range(3):
        a = vertices[faces[:, c]]
        u = vertices[faces[:, (c + 1) % 3]] - a
        v = vertices[faces[:, (c + 2) % 3]] - a
        out[:, c] = np.sum(u * v, axis=1) / np.linalg.norm(np.cross(u, v), axis=1)
    return out


def build_complex(vertices, faces) -> MeshComplex:
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    V, F = len(vertices), len(faces)
    sides = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    keys = np.sort(sides, axis=1)
    edges, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    E = len(edges)
    rows = np.repeat(np.arange(E), 2)
    d0 = sparse.csr_matrix((np.tile([-1.0, 1.0], E), (rows, edges.reshape(-1))), shape=(E, V))
    signs = np.where(sides[:, 0] == keys[:, 0], 1.0, -1.0)
    face_rows = np.tile(np.arange(F), 3)
    d1 = sparse.csr_matrix((signs, (face_rows, inverse)), shape=(F, E))

    cot = _cotangents(vertices, faces)
    area = 0.5 * np.linalg.norm(np.cross(vertices[faces[:, 1]] - vertices[faces[:, 0]],
                                         vertices[faces[:, 2]] - vertices[faces[:, 0]]), axis=1)
    # side (c+1, c+2) is opposite corner c; sides were stacked as (0,1), (1,2), (2,0)
    opposite = np.concatenate([cot[:, 2], cot[:, 0], cot[:, 1]])
    star1 = 0.5 * np.bincount(inverse, weights=opposite, minlength=E)
    lengths2 = np.sum((vertices[sides[:, 0]] - vertices[sides[:, 1]]) ** 2, axis=1)
    # circumcentric dual area: 1/8 sum |e|^2 cot(opposite) split between both endpoints
    share = lengths2 * opposite / 8.0
    star0 = np.bincount(sides[:, 0], weights=share, minlength=V) + np.bincount(sides[:, 1], weights=share, minlength=V)
    star2 = 1.0 / area
    if np.any(star0 <= 0) or np.any(star1 <= 0) or np.any(area <= 0):
        raise MeshError("build_complex failed: non-positive circumcentric Hodge star (mesh is not Delaunay)")
    return MeshComplex(vertices, faces, edges, d0, d1, star0, star1, star2)


def dec_laplacian(mesh: MeshComplex, j: int) -> DecOperator:
    """Delta_j = d-dagger d + d d-dagger in weak form."""
    S0, S1, S2 = (sparse.diags(s) for s in (mesh.star0, mesh.star1, mesh.star2))
    d0, d1 = mesh.d0, mesh.d1
    if j == 0:
        K = d0.T @ S1 @ d0
    elif j == 1:
        K = d1.T @ S2 @ d1 + S1 @ d0 @ sparse.diags(1.0 / mesh.star0) @ d0.T @ S1
    elif j == 2:
        K = S2 @ d1 @ sparse.diags(1.0 / mesh.star1) @ d1.T @ S2
    else:
        raise ValueError(f"dec_laplacian failed: degree {j} outside {{0, 1, 2}}")
    return DecOperator(j, sparse.csr_matrix(K), mesh.mass(j))


def dec_spectrum(mesh: MeshComplex, j: int, k: int | None = None) -> np.ndarray:
    """Smallest k eigenvalues of K v = mu M v (all of them when k is None)."""
    op = dec_laplacian(mesh, j)
    n = op.stiffness.shape[0]
    if k is None or n <= 3000 or k >= n - 1:
        values = linalg.eigh(op.stiffness.toarray(), np.diag(op.mass), eigvals_only=True)
        return np.sort(values)[: (n if k is None else k)]
    values = sparse_linalg.eigsh(op.stiffness, k=k, M=sparse.diags(op.mass), sigma=-1e-3,
                                 which="LM", return_eigenvectors=False)
    return np.sort(values)


def incidence_defect(mesh: MeshComplex) -> float:
    """max |d1 d0| (exactly zero for a valid complex)."""
    product = (mesh.d1 @ mesh.d0).toarray()
    return float(np.max(np.abs(product))) if product.size else 0.0


def betti_numbers(mesh: MeshComplex) -> tuple[int, int, int]:
    V, E, F = mesh.counts
    r0 = np.linalg.matrix_rank(mesh.d0.toarray())
    r1 = np.linalg.matrix_rank(mesh.d1.toarray())
    return V - r0, E - r1 - r0, F - r1


def harmonic_dimensions(mesh: MeshComplex, tol: float = 1e-8) -> tuple[int, int, int]:
    """Kernel dimension of each Delta_j (the discrete Hodge decomposition)."""
    dims = []
    for j in range(3):
        spectrum = dec_spectrum(mesh, j)
        dims.append(int(np.sum(spectrum < tol * max(1.0, spectrum.max()))))
    return tuple(dims)


def icosphere(level: int = 3, radius: float = 1.0) -> MeshComplex:
    """Loop-free midpoint subdivision of the icosahedron, projected to the sphere."""
    g = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [(-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0), (0, -1, g), (0, 1, g),
             (0, -1, -g), (0, 1, -g), (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    vertices = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                mid = vertices[a] + vertices[b]
                vertices.append(mid / np.linalg.norm(mid))
                cache[key] = len(vertices) - 1
            return cache[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    return build_complex(radius * np.array(vertices), np.array(faces))


def torus_mesh(nu: int = 32, nv: int = 12, R: float = 3.0, r: float = 1.0) -> MeshComplex:
    """Torus of revolution with alternate tube rings offset by half a step (acute triangles)."""
    if nv % 2:
        raise MeshError("torus_mesh failed: nv must be even for offset rings")
    i, k = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    u = 2.0 * np.pi * (i + 0.5 * (k % 2)) / nu
    v = 2.0 * np.pi * k / nv
    ring = R + r * np.cos(v)
    vertices = np.stack([ring * np.cos(u), ring * np.sin(u), r * np.sin(v)], axis=-1).reshape(-1, 3)

    def vid(a, b):
        return (a % nu) * nv + (b % nv)

    faces = []
    for a in range(nu):
        for b in range(nv):
            if b % 2 == 0:  # next ring shifted by +1/2
                faces += [(vid(a, b), vid(a + 1, b), vid(a, b + 1)),
                          (vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1))]
            else:  # next ring shifted by -1/2
                faces += [(vid(a, b), vid(a + 1, b), vid(a + 1, b + 1)),
                          (vid(a, b), vid(a + 1, b + 1), vid(a, b + 1))]
    faces = np.array(faces)
    tri = vertices[faces]
    normal = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    centroid = tri.mean(axis=1)
    axis_point = np.stack([centroid[:, 0], centroid[:, 1], np.zeros(len(faces))], axis=1)
    axis_point *= (R / np.linalg.norm(axis_point, axis=1))[:, None]
    outward = np.sum(normal * (centroid - axis_point), axis=1) > 0
    faces[~outward] = faces[~outward][:, [0, 2, 1]]
    return build_complex(vertices, faces)
