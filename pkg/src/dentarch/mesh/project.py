"""Closest-point queries against a triangle mesh surface.

Candidate triangles come from a KD-tree over face centroids (k nearest), then
exact point-triangle projection picks the closest. This is approximate only in
adversarial geometry; for the smooth surfaces handled here it is effectively
exact and fully deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .core import TriMesh


def closest_on_triangles(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Closest point on triangle tri[i] to points[i], vectorized.

    points: (..., 3); tri: (..., 3, 3). Returns (..., 3).
    """
    a, b, c = tri[..., 0, :], tri[..., 1, :], tri[..., 2, :]
    ab = b - a
    ac = c - a
    ap = points - a

    d1 = (ab * ap).sum(-1)
    d2 = (ac * ap).sum(-1)
    bp = points - b
    d3 = (ab * bp).sum(-1)
    d4 = (ac * bp).sum(-1)
    cp = points - c
    d5 = (ab * cp).sum(-1)
    d6 = (ac * cp).sum(-1)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    def safe(numer, denom):
        return numer / np.where(np.abs(denom) < 1e-300, 1.0, denom)

    v_ab = safe(d1, d1 - d3)[..., None]
    w_ac = safe(d2, d2 - d6)[..., None]
    w_bc = safe(d4 - d3, (d4 - d3) + (d5 - d6))[..., None]
    denom = va + vb + vc
    v_in = safe(vb, denom)[..., None]
    w_in = safe(vc, denom)[..., None]

    out = a + ab * v_in + ac * w_in  # interior by default
    on_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    out = np.where(on_bc[..., None], b + (c - b) * w_bc, out)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    out = np.where(on_ac[..., None], a + ac * w_ac, out)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    out = np.where(on_ab[..., None], a + ab * v_ab, out)
    at_c = (d6 >= 0) & (d5 <= d6)
    out = np.where(at_c[..., None], c, out)
    at_b = (d3 >= 0) & (d4 <= d3)
    out = np.where(at_b[..., None], b, out)
    at_a = (d1 <= 0) & (d2 <= 0)
    out = np.where(at_a[..., None], a, out)
    return out


class SurfaceIndex:
    """Reusable closest-point structure for one mesh."""

    def __init__(self, mesh: TriMesh, k: int = 32):
        self.tri = mesh.triangles()
        self.k = min(k, len(self.tri))
        self._tree = cKDTree(self.tri.mean(axis=1))

    def project(self, points: np.ndarray) -> np.ndarray:
        """Closest surface point for each query point; (n, 3) -> (n, 3)."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        _, idx = self._tree.query(points, k=self.k)
        idx = idx.reshape(len(points), self.k)
        cand = closest_on_triangles(points[:, None, :], self.tri[idx])
        d2 = ((cand - points[:, None, :]) ** 2).sum(-1)
        best = d2.argmin(axis=1)
        return cand[np.arange(len(points)), best]

    def distance(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.linalg.norm(self.project(points) - points, axis=1)
