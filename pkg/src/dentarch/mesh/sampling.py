"""Deterministic point sampling from a mesh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TriMesh


@dataclass
class PointSample:
    points: np.ndarray  # (v, 3) mm
    mesh_id: str


def sample_points(mesh: TriMesh, v: int = 4096, seed: int = 0,
                  mesh_id: str = "") -> PointSample:
    """Sample v points: vertices without replacement when the mesh has enough,
    otherwise all vertices plus area-weighted surface samples."""
    if mesh.n_vertices < 3:
        raise ValueError("mesh needs at least 3 vertices")
    rng = np.random.default_rng(seed)
    n = mesh.n_vertices
    if n >= v:
        idx = rng.choice(n, size=v, replace=False)
        pts = mesh.vertices[idx]
    else:
        areas = mesh.face_areas()
        probs = areas / areas.sum()
        fidx = rng.choice(mesh.n_faces, size=v - n, p=probs)
        r1 = rng.random(v - n)
        r2 = rng.random(v - n)
        flip = r1 + r2 > 1.0
        r1 = np.where(flip, 1.0 - r1, r1)
        r2 = np.where(flip, 1.0 - r2, r2)
        tri = mesh.triangles()[fidx]
        extra = (tri[:, 0] * (1.0 - r1 - r2)[:, None]
                 + tri[:, 1] * r1[:, None] + tri[:, 2] * r2[:, None])
        pts = np.vstack([mesh.vertices, extra])
    return PointSample(points=pts, mesh_id=mesh_id)
