"""Indexed triangle mesh with ASCII OBJ/OFF readers and writers.

Coordinates are millimeters. Faces are vertex-index triples with consistent
winding; per-face adjacency marks boundary slots with -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DegenerateMesh, ParseError

AREA_EPS = 1e-12


@dataclass
class TriMesh:
    vertices: np.ndarray  # (n, 3) float64, mm
    faces: np.ndarray     # (m, 3) int64

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def copy(self) -> "TriMesh":
        return TriMesh(self.vertices.copy(), self.faces.copy())

    def triangles(self) -> np.ndarray:
        """(m, 3, 3) corner coordinates."""
        return self.vertices[self.faces]

    def face_normals(self, unit: bool = True) -> np.ndarray:
        tri = self.triangles()
        n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        if unit:
            norm = np.linalg.norm(n, axis=1, keepdims=True)
            n = n / np.maximum(norm, 1e-300)
        return n

    def face_areas(self) -> np.ndarray:
        tri = self.triangles()
        n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return 0.5 * np.linalg.norm(n, axis=1)

    def edge_face_count(self) -> dict[tuple[int, int], int]:
        """Undirected edge -> number of incident faces."""
        counts: dict[tuple[int, int], int] = {}
        for a, b, c in self.faces:
            for u, v in ((a, b), (b, c), (c, a)):
                key = (u, v) if u < v else (v, u)
                counts[key] = counts.get(key, 0) + 1
        return counts

    def face_adjacency(self) -> np.ndarray:
        """(m, 3) neighbor face index per edge slot (a-b, b-c, c-a); -1 at boundary."""
        owner: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for fi, (a, b, c) in enumerate(self.faces):
            for slot, (u, v) in enumerate(((a, b), (b, c), (c, a))):
                key = (u, v) if u < v else (v, u)
                owner.setdefault(key, []).append((fi, slot))
        adj = np.full((self.n_faces, 3), -1, dtype=np.int64)
        for incident in owner.values():
            if len(incident) == 2:
                (f0, s0), (f1, s1) = incident
                adj[f0, s0] = f1
                adj[f1, s1] = f0
        return adj

    def is_edge_manifold(self) -> bool:
        return all(c <= 2 for c in self.edge_face_count().values())

    def boundary_edge_count(self) -> int:
        return sum(1 for c in self.edge_face_count().values() if c == 1)

    def validate(self) -> None:
        """Raise if indices are out of range or any face is degenerate."""
        if self.n_faces == 0:
            raise DegenerateMesh("mesh has no faces")
        if self.faces.min() < 0 or self.faces.max() >= self.n_vertices:
            raise ParseError("face index out of range")
        same = (
            (self.faces[:, 0] == self.faces[:, 1])
            | (self.faces[:, 1] == self.faces[:, 2])
            | (self.faces[:, 0] == self.faces[:, 2])
        )
        if same.any():
            raise DegenerateMesh(f"face {int(np.flatnonzero(same)[0])} repeats a vertex")
        areas = self.face_areas()
        if (areas <= AREA_EPS).any():
            raise DegenerateMesh(
                f"face {int(np.flatnonzero(areas <= AREA_EPS)[0])} has near-zero area")


def _parse_obj(text: str) -> tuple[list, list]:
    verts, faces = [], []
    for ln, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"line {ln}: vertex needs 3 coordinates")
            try:
                verts.append([float(x) for x in parts[1:4]])
            except ValueError as exc:
                raise ParseError(f"line {ln}: bad vertex coordinate") from exc
        elif tag == "f":
            if len(parts) != 4:
                raise ParseError(f"line {ln}: only triangle faces supported")
            idx = []
            for token in parts[1:4]:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise ParseError(f"line {ln}: bad face index {token!r}") from exc
                if i <= 0:
                    raise ParseError(f"line {ln}: face index {i} not positive")
                idx.append(i - 1)
            faces.append(idx)
    return verts, faces


def _parse_off(text: str) -> tuple[list, list]:
    tokens: list[str] = []
    for line in text.splitlines():
        stripped = line.split("#")[0].strip()
        if stripped:
            tokens.extend(stripped.split())
    if not tokens or tokens[0] != "OFF":
        raise ParseError("missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # skip edge count
        verts = []
        for _ in range(nv):
            verts.append([float(x) for x in tokens[pos:pos + 3]])
            pos += 3
        faces = []
        for _ in range(nf):
            k = int(tokens[pos])
            if k != 3:
                raise ParseError(f"only triangle faces supported, got {k}-gon")
            faces.append([int(x) for x in tokens[pos + 1:pos + 4]])
            pos += 4
    except (ValueError, IndexError) as exc:
        raise ParseError("truncated or malformed OFF body") from exc
    return verts, faces


def load_mesh(path, fmt: str | None = None) -> TriMesh:
    """Read an ASCII OBJ or OFF file; format inferred from suffix if omitted."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).upper()
    text = path.read_text()
    if fmt == "OBJ":
        verts, faces = _parse_obj(text)
    elif fmt == "OFF":
        verts, faces = _parse_off(text)
    else:
        raise ParseError(f"unknown mesh format {fmt!r}")
    if not faces:
        raise DegenerateMesh(f"{path}: no faces")
    faces_arr = np.asarray(faces, dtype=np.int64)
    if len(verts) == 0 or faces_arr.min() < 0 or faces_arr.max() >= len(verts):
        raise ParseError(f"{path}: face references missing vertex")
    return TriMesh(np.asarray(verts, dtype=np.float64), faces_arr)


def save_mesh(mesh: TriMesh, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).upper()
    lines: list[str] = []
    if fmt == "OBJ":
        for v in mesh.vertices:
            lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
        for f in mesh.faces:
            lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    elif fmt == "OFF":
        lines.append("OFF")
        lines.append(f"{mesh.n_vertices} {mesh.n_faces} 0")
        for v in mesh.vertices:
            lines.append(f"{v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
        for f in mesh.faces:
            lines.append(f"3 {f[0]} {f[1]} {f[2]}")
    else:
        raise ParseError(f"unknown mesh format {fmt!r}")
    path.write_text("\n".join(lines) + "\n")
