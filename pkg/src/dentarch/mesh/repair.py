"""Manifold cleaning: vertex merging, degenerate/duplicate face removal,
non-manifold edge resolution, and small-hole fan filling."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import IrreparableMesh
from .core import AREA_EPS, TriMesh


def _merge_close_vertices(verts: np.ndarray, faces: np.ndarray, tol: float):
    tree = cKDTree(verts)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return verts, faces, False
    root = np.arange(len(verts))

    def find(i):
        while root[i] != i:
            root[i] = root[root[i]]
            i = root[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            # lowest index is the representative
            if ra < rb:
                root[rb] = ra
            else:
                root[ra] = rb
    rep = np.array([find(i) for i in range(len(verts))])
    keep = np.flatnonzero(rep == np.arange(len(verts)))
    remap = np.full(len(verts), -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    return verts[keep], remap[rep[faces]], True


def _drop_bad_faces(faces: np.ndarray, verts: np.ndarray):
    """Remove faces with repeated vertices, near-zero area, or exact duplicates."""
    if len(faces) == 0:
        return faces, False
    distinct = (
        (faces[:, 0] != faces[:, 1])
        & (faces[:, 1] != faces[:, 2])
        & (faces[:, 0] != faces[:, 2])
    )
    tri = verts[np.clip(faces, 0, len(verts) - 1)]
    areas = 0.5 * np.linalg.norm(
        np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
    keep = distinct & (areas > AREA_EPS)
    seen: set[tuple[int, int, int]] = set()
    for i in np.flatnonzero(keep):
        key = tuple(sorted(faces[i]))
        if key in seen:
            keep[i] = False
        else:
            seen.add(key)
    return faces[keep], not keep.all()


def _edge_map(faces: np.ndarray) -> dict[tuple[int, int], list[int]]:
    edges: dict[tuple[int, int], list[int]] = {}
    for fi, (a, b, c) in enumerate(faces):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            edges.setdefault(key, []).append(fi)
    return edges


def _drop_nonmanifold(faces: np.ndarray, verts: np.ndarray):
    """At edges with 3+ incident faces, drop the face whose normal deviates most
    from the area-weighted mean normal of the edge's faces; repeat to fixpoint."""
    changed = False
    while True:
        edges = _edge_map(faces)
        bad = [(k, fs) for k, fs in edges.items() if len(fs) > 2]
        if not bad:
            return faces, changed
        bad.sort()
        _, incident = bad[0]
        tri = verts[faces[incident]]
        normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        mean = normals.sum(axis=0)
        mean /= max(np.linalg.norm(mean), 1e-300)
        unit = normals / np.maximum(
            np.linalg.norm(normals, axis=1, keepdims=True), 1e-300)
        deviation = 1.0 - unit @ mean
        worst = int(np.flatnonzero(deviation == deviation.max())[0])
        faces = np.delete(faces, incident[worst], axis=0)
        changed = True


def _boundary_loops(faces: np.ndarray) -> list[list[int]]:
    """Closed directed boundary loops (each vertex visited once); open or
    ambiguous chains are skipped."""
    edges = _edge_map(faces)
    boundary = {k for k, fs in edges.items() if len(fs) == 1}
    succ: dict[int, list[int]] = {}
    for fi, (a, b, c) in enumerate(faces):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            if key in boundary:
                succ.setdefault(u, []).append(v)
    loops = []
    used: set[tuple[int, int]] = set()
    for start in sorted(succ):
        for first in sorted(succ[start]):
            if (start, first) in used:
                continue
            loop = [start]
            cur, ok = first, True
            while cur != start:
                loop.append(cur)
                nxts = [v for v in sorted(succ.get(cur, [])) if (cur, v) not in used
                        and v not in loop[1:]]
                if not nxts or len(loop) > len(faces) * 3:
                    ok = False
                    break
                cur = nxts[0]
            if ok and len(loop) >= 3:
                for u, v in zip(loop, loop[1:] + loop[:1]):
                    used.add((u, v))
                loops.append(loop)
    return loops


def _fill_holes(faces: np.ndarray, max_hole_edges: int):
    loops = [lp for lp in _boundary_loops(faces) if len(lp) <= max_hole_edges]
    if not loops:
        return faces, False
    new_faces = []
    for loop in loops:
        # rotate so the lowest-index vertex is the fan root
        k = loop.index(min(loop))
        loop = loop[k:] + loop[:k]
        root = loop[0]
        for i in range(1, len(loop) - 1):
            # wind opposite to the boundary traversal to match neighbor orientation
            new_faces.append((root, loop[i + 1], loop[i]))
    return np.vstack([faces, np.asarray(new_faces, dtype=np.int64)]), True


def repair(mesh: TriMesh, merge_tol: float = 1e-6,
           max_hole_edges: int = 32) -> TriMesh:
    """Return an edge-manifold copy: duplicates merged, degenerates dropped,
    non-manifold fans resolved, holes up to ``max_hole_edges`` fan-filled.

    Raises IrreparableMesh if an edge still borders more than two faces after
    all heuristics.
    """
    if mesh.n_faces == 0:
        raise IrreparableMesh("empty mesh")
    verts, faces = mesh.vertices.copy(), mesh.faces.copy()
    verts, faces, merged = _merge_close_vertices(verts, faces, merge_tol)
    faces, dropped = _drop_bad_faces(faces, verts)
    faces, demanifolded = _drop_nonmanifold(faces, verts)
    faces, filled = _fill_holes(faces, max_hole_edges)
    if filled:
        faces, _ = _drop_nonmanifold(faces, verts)
    changed = merged or dropped or demanifolded or filled
    if changed:
        # drop vertices that lost every face
        used = np.zeros(len(verts), dtype=bool)
        used[faces] = True
        remap = np.full(len(verts), -1, dtype=np.int64)
        remap[used] = np.arange(int(used.sum()))
        verts, faces = verts[used], remap[faces]
    out = TriMesh(verts, faces)
    if out.n_faces == 0:
        raise IrreparableMesh("no faces survive cleaning")
    if not out.is_edge_manifold():
        raise IrreparableMesh("non-manifold edges persist after cleaning")
    return out
