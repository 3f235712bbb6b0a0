"""Simple closed meshes used by tests and self-checks."""

from __future__ import annotations

import numpy as np

from .core import TriMesh


def single_triangle() -> TriMesh:
    return TriMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]),
                   np.array([[0, 1, 2]]))


def cube(edge: float = 1.0) -> TriMesh:
    v = edge * np.array(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
         [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=np.float64)
    f = np.array([
        [0, 2, 1], [0, 3, 2],      # bottom (z=0)
        [4, 5, 6], [4, 6, 7],      # top (z=1)
        [0, 1, 5], [0, 5, 4],      # front (y=0)
        [1, 2, 6], [1, 6, 5],      # right (x=1)
        [2, 3, 7], [2, 7, 6],      # back (y=1)
        [3, 0, 4], [3, 4, 7],      # left (x=0)
    ], dtype=np.int64)
    return TriMesh(v, f)


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> TriMesh:
    """Icosahedron refined by midpoint splits, vertices pushed to the sphere.
    Face count: 20 * 4^subdivisions."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    vlist = [v for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                p = 0.5 * (vlist[a] + vlist[b])
                vlist.append(p / np.linalg.norm(p))
                cache[key] = len(vlist) - 1
            return cache[key]

        faces = [child for a, b, c in faces for child in
                 ((a, mid(a, b), mid(c, a)), (mid(a, b), b, mid(b, c)),
                  (mid(c, a), mid(b, c), c), (mid(a, b), mid(b, c), mid(c, a)))]
    return TriMesh(radius * np.array(vlist), np.array(faces, dtype=np.int64))
