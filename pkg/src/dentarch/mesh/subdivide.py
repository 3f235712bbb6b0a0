"""Midpoint subdivision with surface reprojection, and patch extraction.

Each base face is split 1-to-4 per level with children emitted in a fixed
order (corner 0, corner 1, corner 2, center), so after L levels the 4^L
descendants of base face b occupy the contiguous slice [b*4^L, (b+1)*4^L).
Every refined vertex carries integer barycentric lattice coordinates inside
its base triangle (scaled by 2^L), which gives patches their canonical vertex
order. Newly created vertices are projected back onto the source surface at
each level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TriMesh
from .simplify import BaseMesh
from .project import SurfaceIndex

PATCH_FACES = 64     # 4^3
PATCH_VERTICES = 45  # (8+1)(8+2)/2
DESCRIPTOR_DIM = 13


@dataclass
class RefinedMesh:
    mesh: TriMesh
    base_face: np.ndarray    # (m,) owning base-face id per refined face
    corner_bary: np.ndarray  # (m, 3, 3) integer lattice coords of face corners
    levels: int
    base_face_count: int


@dataclass
class Patch:
    face_descriptors: np.ndarray  # (64, 13)
    rel_vertices: np.ndarray      # (45, 3), centroid-relative
    centroid: np.ndarray          # (3,)


@dataclass
class PatchSet:
    descriptors: np.ndarray    # (n, 64, 13)
    rel_vertices: np.ndarray   # (n, 45, 3)
    centroids: np.ndarray      # (n, 3)

    def __len__(self) -> int:
        return len(self.centroids)

    @property
    def patches(self) -> list[Patch]:
        return [Patch(self.descriptors[i], self.rel_vertices[i], self.centroids[i])
                for i in range(len(self))]


def subdivide(base: BaseMesh, levels: int = 3) -> RefinedMesh:
    """Split every face 1-to-4 ``levels`` times; faces_out = faces_in * 4^levels."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    scale = 2 ** levels
    mesh = base.mesh
    verts: list[np.ndarray] = [v for v in mesh.vertices]
    faces = [tuple(f) for f in mesh.faces]
    owners = list(range(len(faces)))
    corner0 = np.array([scale, 0, 0], dtype=np.int64)
    corner1 = np.array([0, scale, 0], dtype=np.int64)
    corner2 = np.array([0, 0, scale], dtype=np.int64)
    barys = [(corner0, corner1, corner2)] * len(faces)
    surface = SurfaceIndex(base.source)

    for _ in range(levels):
        midcache: dict[tuple[int, int], int] = {}
        new_ids: list[int] = []

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            vid = midcache.get(key)
            if vid is None:
                vid = len(verts)
                verts.append(0.5 * (verts[a] + verts[b]))
                midcache[key] = vid
                new_ids.append(vid)
            return vid

        next_faces, next_owners, next_barys = [], [], []
        for (a, b, c), owner, (ba, bb, bc) in zip(faces, owners, barys):
            mab, mbc, mca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            gab, gbc, gca = (ba + bb) // 2, (bb + bc) // 2, (bc + ba) // 2
            next_faces += [(a, mab, mca), (mab, b, mbc), (mca, mbc, c),
                           (mab, mbc, mca)]
            next_owners += [owner] * 4
            next_barys += [(ba, gab, gca), (gab, bb, gbc), (gca, gbc, bc),
                           (gab, gbc, gca)]
        faces, owners, barys = next_faces, next_owners, next_barys

        if new_ids:
            fresh = np.array([verts[i] for i in new_ids])
            projected = surface.project(fresh)
            for i, vid in enumerate(new_ids):
                verts[vid] = projected[i]

    refined = TriMesh(np.array(verts), np.array(faces, dtype=np.int64))
    return RefinedMesh(
        mesh=refined,
        base_face=np.array(owners, dtype=np.int64),
        corner_bary=np.array(barys, dtype=np.int64),
        levels=levels,
        base_face_count=mesh.n_faces,
    )


def _interior_angles(tri: np.ndarray) -> np.ndarray:
    """(m, 3) angles at corners a, b, c in radians."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]

    def angle(p, q, r):
        u, v = q - p, r - p
        cos = (u * v).sum(-1) / np.maximum(
            np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1), 1e-300)
        return np.arccos(np.clip(cos, -1.0, 1.0))

    return np.stack([angle(a, b, c), angle(b, c, a), angle(c, a, b)], axis=1)


def build_patches(refined: RefinedMesh) -> PatchSet:
    """One patch per base face: 64 face descriptor rows plus 45 canonically
    ordered centroid-relative vertices.

    Descriptor layout (13): face centroid relative to patch centroid (3),
    unit normal (3), interior angles sorted ascending (3), area (1),
    vertex-to-patch-centroid distances sorted ascending (3).
    """
    if refined.levels != 3:
        raise ValueError("patches require level-3 subdivision (64 faces each)")
    mesh = refined.mesh
    n_patches = refined.base_face_count
    tri = mesh.triangles()                      # (m, 3, 3)
    normals = mesh.face_normals()               # (m, 3)
    areas = mesh.face_areas()                   # (m,)
    angles = np.sort(_interior_angles(tri), axis=1)
    face_centroids = tri.mean(axis=1)           # (m, 3)

    descriptors = np.empty((n_patches, PATCH_FACES, DESCRIPTOR_DIM))
    rel_vertices = np.empty((n_patches, PATCH_VERTICES, 3))
    centroids = np.empty((n_patches, 3))

    for b in range(n_patches):
        lo = b * PATCH_FACES
        sl = slice(lo, lo + PATCH_FACES)
        # canonical vertex order: ascending lexicographic lattice coordinates
        lattice: dict[tuple[int, int, int], int] = {}
        for f_local in range(PATCH_FACES):
            f = lo + f_local
            for corner in range(3):
                lattice[tuple(refined.corner_bary[f, corner])] = mesh.faces[f, corner]
        if len(lattice) != PATCH_VERTICES:
            raise ValueError(f"patch {b}: {len(lattice)} distinct vertices")
        order = [lattice[key] for key in sorted(lattice)]
        pverts = mesh.vertices[order]
        centroid = pverts.mean(axis=0)
        centroids[b] = centroid
        rel_vertices[b] = pverts - centroid

        fc = face_centroids[sl] - centroid
        vdist = np.sort(
            np.linalg.norm(tri[sl] - centroid, axis=2), axis=1)
        descriptors[b] = np.concatenate(
            [fc, normals[sl], angles[sl], areas[sl, None], vdist], axis=1)

    return PatchSet(descriptors, rel_vertices, centroids)
