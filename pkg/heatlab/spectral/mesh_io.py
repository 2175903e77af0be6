"""Plain-text triangle meshes: "v x y z" and 1-indexed "f i j k" lines."""

from __future__ import annotations

from collections import defaultdict, deque
from pathlib import Path

import numpy as np

from heatlab.errors import MeshError
from heatlab.spectral.dec import MeshComplex, build_complex


def parse_mesh(text: str) -> tuple[np.ndarray, np.ndarray]:
    vertices, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "v" and len(parts) == 4:
                vertices.append([float(p) for p in parts[1:]])
            elif parts[0] == "f" and len(parts) == 4:
                faces.append([int(p) - 1 for p in parts[1:]])
            else:
                raise ValueError(raw)
        except ValueError:
            raise MeshError(f"read_mesh failed (line {lineno}): cannot parse {raw.strip()!r}") from None
    vertices = np.array(vertices, dtype=float).reshape(-1, 3)
    faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
    if not len(faces):
        raise MeshError("read_mesh failed: no faces")
    if faces.min() < 0 or faces.max() >= len(vertices):
        raise MeshError("read_mesh failed: face index out of range")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
        raise MeshError("read_mesh failed: degenerate face")
    return vertices, faces


def orient_faces(faces: np.ndarray, n_vertices: int) -> np.ndarray:
    """Consistently orient a closed 2-manifold by breadth-first flips.

    Raises MeshError for boundary edges, edges shared by more than two faces,
    non-manifold vertices, or a non-orientable surface.
    """
    faces = faces.copy()
    edge_faces: dict[tuple[int, int], list[int]] = defaultdict(list)
    for f, tri in enumerate(faces):
        for c in range(3):
            a, b = int(tri[c]), int(tri[(c + 1) % 3])
            edge_faces[(min(a, b), max(a, b))].append(f)
    for edge, owners in edge_faces.items():
        if len(owners) != 2:
            kind = "boundary" if len(owners) == 1 else "non-manifold"
            raise MeshError(f"read_mesh failed: {kind} edge {edge}")
    _check_vertex_fans(faces, n_vertices)

    def directed(tri, a, b):
        for c in range(3):
            if tri[c] == a and tri[(c + 1) % 3] == b:
                return True
        return False

    seen = np.zeros(len(faces), dtype=bool)
    for root in range(len(faces)):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            f = queue.popleft()
            tri = faces[f]
            for c in range(3):
                a, b = int(tri[c]), int(tri[(c + 1) % 3])
                (g,) = [o for o in edge_faces[(min(a, b), max(a, b))] if o != f]
                # a consistent neighbour traverses the shared edge as b -> a
                agrees = directed(faces[g], b, a)
                if seen[g]:
                    if not agrees:
                        raise MeshError("read_mesh failed: surface is not orientable")
                    continue
                if not agrees:
                    faces[g] = faces[g][[0, 2, 1]]
                seen[g] = True
                queue.append(g)
    return faces


def _check_vertex_fans(faces: np.ndarray, n_vertices: int) -> None:
    """Faces around each vertex must form a single edge-connected fan."""
    incident: dict[int, list[int]] = defaultdict(list)
    for f, tri in enumerate(faces):
        for v in tri:
            incident[int(v)].append(f)
    for v in range(n_vertices):
        around = incident.get(v, [])
        if not around:
            continue
        links = {f: {int(w) for w in faces[f] if w != v} for f in around}
        reached = {around[0]}
        frontier = [around[0]]
        while frontier:
            f = frontier.pop()
            for g in around:
                if g not in reached and links[f] & links[g]:
                    reached.add(g)
                    frontier.append(g)
        if len(reached) != len(around):
            raise MeshError(f"read_mesh failed: non-manifold vertex {v + 1}")


def read_mesh(path) -> MeshComplex:
    vertices, faces = parse_mesh(Path(path).read_text())
    return build_complex(vertices, orient_faces(faces, len(vertices)))


def write_mesh(mesh: MeshComplex, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    path.write_text("\n".join(lines) + "\n")
    return path
