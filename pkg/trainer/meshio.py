"""Triangle mesh input: OBJ parsing, validation, normalization, fixtures."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np


class NonWatertightMesh(Exception):
    """The mesh has boundary or non-manifold edges; signs would be undefined."""


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray  # (v, 3)
    faces: np.ndarray  # (f, 3) int

    def __post_init__(self):
        object.__setattr__(self, "vertices",
                           np.asarray(self.vertices, dtype=np.float64))
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64))


def load_obj(path) -> Mesh:
    """Minimal OBJ reader: v and (triangular) f records, 1-based indices."""
    verts = []
    faces = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) - 1 for tok in parts[1:]]
                if len(idx) != 3:
                    raise ValueError(f"non-triangular face in {path}")
                faces.append(idx)
    return Mesh(np.array(verts), np.array(faces))


def write_obj(mesh: Mesh, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in mesh.vertices:
            f.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for a, b, c in mesh.faces:
            f.write(f"f {a + 1} {b + 1} {c + 1}\n")


def check_watertight(mesh: Mesh) -> None:
    """Every directed edge must be matched by its reverse exactly once."""
    count = Counter()
    for a, b, c in mesh.faces:
        for e in ((a, b), (b, c), (c, a)):
            count[e] += 1
    for (a, b), n in count.items():
        if n != 1 or count.get((b, a), 0) != 1:
            raise NonWatertightMesh(f"edge ({a}, {b}) fails manifold pairing")


def normalize_to_unit_sphere(mesh: Mesh) -> Mesh:
    """Center on the bounding-box midpoint; shrink into the unit sphere.

    Shapes already inside the unit sphere keep their scale, so a radius-0.5
    sphere mesh still trains to f(0) close to -0.5.
    """
    center = (mesh.vertices.min(axis=0) + mesh.vertices.max(axis=0)) / 2.0
    v = mesh.vertices - center
    r = np.linalg.norm(v, axis=1).max()
    if r > 1.0:
        v = v / r
    return Mesh(v, mesh.faces)


def make_box_mesh(halfwidth: float = 0.5) -> Mesh:
    """Axis-aligned cube of the given half-extent, 12 triangles."""
    h = halfwidth
    corners = np.array(
        [[x, y, z] for z in (-h, h) for y in (-h, h) for x in (-h, h)]
    )
    # two triangles per face, outward winding
    quads = [
        (0, 2, 3, 1),  # z = -h
        (4, 5, 7, 6),  # z = +h
        (0, 1, 5, 4),  # y = -h
        (2, 6, 7, 3),  # y = +h
        (0, 4, 6, 2),  # x = -h
        (1, 3, 7, 5),  # x = +h
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return Mesh(corners, np.array(faces))


def make_icosphere(radius: float = 0.5, subdivisions: int = 3) -> Mesh:
    """Subdivided icosahedron projected onto a sphere."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v / np.linalg.norm(v) for v in verts]
    cache: dict = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = verts[i] + verts[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    for _ in range(subdivisions):
        nxt = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = nxt
    return Mesh(np.array(verts) * radius, np.array(faces))
