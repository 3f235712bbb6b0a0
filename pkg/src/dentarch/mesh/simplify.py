"""Quadric-error-metric edge-collapse simplification with boundary preservation.

Pure-Python inner loop on float tuples: at the mesh sizes handled here this is
faster than per-collapse numpy dispatch by a wide margin. Collapse order is
fully deterministic: cost ties break on the lower vertex index.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import sqrt

import numpy as np

from ..errors import SimplifyStall
from .core import AREA_EPS, TriMesh
from .project import SurfaceIndex

_DET_EPS = 1e-10
_BOUNDARY_PENALTY = 1e3


@dataclass
class BaseMesh:
    """Simplified mesh plus provenance and a handle to the source surface."""

    mesh: TriMesh
    provenance: np.ndarray  # source face id per base face
    source: TriMesh
    hausdorff_mm: float     # one-sided max distance, base vertices -> source


_Q0 = (0.0,) * 10


def _qadd(p, q):
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3], p[4] + q[4],
            p[5] + q[5], p[6] + q[6], p[7] + q[7], p[8] + q[8], p[9] + q[9])


def _plane_quadric(a, b, c, d, w):
    return (w * a * a, w * a * b, w * a * c, w * a * d,
            w * b * b, w * b * c, w * b * d,
            w * c * c, w * c * d, w * d * d)


def _qcost(q, x, y, z):
    return (q[0] * x * x + 2.0 * q[1] * x * y + 2.0 * q[2] * x * z
            + 2.0 * q[3] * x + q[4] * y * y + 2.0 * q[5] * y * z
            + 2.0 * q[6] * y + q[7] * z * z + 2.0 * q[8] * z + q[9])


def _qsolve(q):
    a, b, c, d, e, f = q[0], q[1], q[2], q[4], q[5], q[7]
    det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    scale = max(abs(a), abs(b), abs(c), abs(d), abs(e), abs(f), 1e-30)
    if abs(det) <= _DET_EPS * scale * scale * scale:
        return None
    rx, ry, rz = -q[3], -q[6], -q[8]
    x = (rx * (d * f - e * e) - b * (ry * f - e * rz) + c * (ry * e - d * rz)) / det
    y = (a * (ry * f - e * rz) - rx * (b * f - e * c) + c * (b * rz - ry * c)) / det
    z = (a * (d * rz - ry * e) - b * (b * rz - ry * c) + rx * (b * e - d * c)) / det
    return (x, y, z)


def _cross(ux, uy, uz, vx, vy, vz):
    return uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx


class _Collapser:
    def __init__(self, mesh: TriMesh):
        self.pos = [tuple(map(float, p)) for p in mesh.vertices]
        self.faces = [list(map(int, f)) for f in mesh.faces]
        self.falive = bytearray([1]) * len(self.faces)
        self.vfaces: list[set] = [set() for _ in self.pos]
        for fi, f in enumerate(self.faces):
            for v in f:
                self.vfaces[v].add(fi)
        self.quad = [_Q0] * len(self.pos)
        self.stamp = [0] * len(self.pos)
        # placement heuristic only; merged on collapse (never cleared)
        self.vbnd = bytearray(len(self.pos))
        self.n_alive = len(self.faces)
        self.heap: list = []
        self._init_quadrics()

    # -- setup --------------------------------------------------------------

    def _face_geo(self, fi, override=None):
        """(unit normal, area) with optional vertex position overrides."""
        f = self.faces[fi]
        pts = [override.get(v, self.pos[v]) if override else self.pos[v] for v in f]
        (ax, ay, az), (bx, by, bz), (cx, cy, cz) = pts
        nx, ny, nz = _cross(bx - ax, by - ay, bz - az, cx - ax, cy - ay, cz - az)
        norm = sqrt(nx * nx + ny * ny + nz * nz)
        if norm < 1e-300:
            return (0.0, 0.0, 0.0), 0.0
        return (nx / norm, ny / norm, nz / norm), 0.5 * norm

    def _init_quadrics(self):
        edge_faces: dict = {}
        for fi, f in enumerate(self.faces):
            (n, area) = self._face_geo(fi)
            if area <= 0.0:
                continue
            px, py, pz = self.pos[f[0]]
            d = -(n[0] * px + n[1] * py + n[2] * pz)
            fq = _plane_quadric(n[0], n[1], n[2], d, area)
            for v in f:
                self.quad[v] = _qadd(self.quad[v], fq)
            for u, v in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (u, v) if u < v else (v, u)
                edge_faces.setdefault(key, []).append(fi)
        for (u, v), fs in edge_faces.items():
            if len(fs) != 1:
                continue
            self.vbnd[u] = 1
            self.vbnd[v] = 1
            # perpendicular constraint plane keeps the open boundary in place
            (ux, uy, uz), (vx, vy, vz) = self.pos[u], self.pos[v]
            ex, ey, ez = vx - ux, vy - uy, vz - uz
            n, _ = self._face_geo(fs[0])
            cx, cy, cz = _cross(ex, ey, ez, n[0], n[1], n[2])
            norm = sqrt(cx * cx + cy * cy + cz * cz)
            if norm < 1e-300:
                continue
            cx, cy, cz = cx / norm, cy / norm, cz / norm
            d = -(cx * ux + cy * uy + cz * uz)
            w = _BOUNDARY_PENALTY * (ex * ex + ey * ey + ez * ez)
            bq = _plane_quadric(cx, cy, cz, d, w)
            self.quad[u] = _qadd(self.quad[u], bq)
            self.quad[v] = _qadd(self.quad[v], bq)
        for u, v in edge_faces:
            self._push(u, v)

    # -- topology helpers -----------------------------------------------------

    def _ring(self, u) -> set:
        out = set()
        for fi in self.vfaces[u]:
            out.update(self.faces[fi])
        out.discard(u)
        return out

    def _shared_faces(self, u, v) -> set:
        return self.vfaces[u] & self.vfaces[v]

    # -- candidate costs -----------------------------------------------------------

    def _push(self, u, v):
        if u > v:
            u, v = v, u
        qsum = _qadd(self.quad[u], self.quad[v])
        u_bnd = self.vbnd[u]
        v_bnd = self.vbnd[v]
        if u_bnd != v_bnd:
            # keep the boundary endpoint fixed
            p = self.pos[u] if u_bnd else self.pos[v]
        else:
            p = _qsolve(qsum)
            if p is None:
                (ux, uy, uz), (vx, vy, vz) = self.pos[u], self.pos[v]
                cands = (((ux + vx) / 2, (uy + vy) / 2, (uz + vz) / 2),
                         self.pos[u], self.pos[v])
                p = min(cands, key=lambda c: _qcost(qsum, *c))
        cost = _qcost(qsum, *p)
        heapq.heappush(
            self.heap, (cost, u, v, self.stamp[u], self.stamp[v], p))

    # -- legality ---------------------------------------------------------------

    def _legal(self, u, v, p) -> bool:
        shared = self._shared_faces(u, v)
        if len(shared) not in (1, 2):
            return False
        # link condition: common neighbors are exactly the shared-face apices
        common = self._ring(u) & self._ring(v)
        if len(common) != len(shared):
            return False
        # no face may flip or collapse when u and v move to p
        override = {u: p, v: p}
        for fi in (self.vfaces[u] | self.vfaces[v]) - shared:
            n_old, a_old = self._face_geo(fi)
            n_new, a_new = self._face_geo(fi, override)
            if a_new <= AREA_EPS:
                return False
            if (n_old[0] * n_new[0] + n_old[1] * n_new[1]
                    + n_old[2] * n_new[2]) <= 1e-12:
                return False
        return True

    # -- main loop -------------------------------------------------------------------

    def run(self, target_faces: int) -> None:
        progressed = True
        while self.n_alive > target_faces + 1:
            if not self.heap:
                # collapses elsewhere can re-legalize edges whose entries were
                # already consumed; rescan once before declaring a stall
                if not progressed:
                    raise SimplifyStall(
                        f"stalled at {self.n_alive} faces (target {target_faces})")
                self._rescan()
                progressed = False
                continue
            cost, u, v, su, sv, p = heapq.heappop(self.heap)
            if self.stamp[u] != su or self.stamp[v] != sv:
                continue
            if not self.vfaces[u] or not self.vfaces[v]:
                continue
            if not self._legal(u, v, p):
                continue
            self._collapse(u, v, p)
            progressed = True
        if self.n_alive == target_faces + 1:
            self._final_step()

    def _final_step(self) -> None:
        """One face above target: land exactly by preferring a boundary
        collapse (removes one face); fall back to an interior one (target-1)."""
        candidates = []
        seen = set()
        for fi in range(len(self.faces)):
            if not self.falive[fi]:
                continue
            f = self.faces[fi]
            for u, v in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (u, v) if u < v else (v, u)
                if key in seen:
                    continue
                seen.add(key)
                qsum = _qadd(self.quad[key[0]], self.quad[key[1]])
                p = _qsolve(qsum)
                if p is None:
                    (ux, uy, uz), (vx, vy, vz) = self.pos[key[0]], self.pos[key[1]]
                    cands = (((ux + vx) / 2, (uy + vy) / 2, (uz + vz) / 2),
                             self.pos[key[0]], self.pos[key[1]])
                    p = min(cands, key=lambda c: _qcost(qsum, *c))
                candidates.append((_qcost(qsum, *p), key[0], key[1], p))
        candidates.sort(key=lambda c: c[:3])
        for want_boundary in (True, False):
            for cost, u, v, p in candidates:
                if (len(self._shared_faces(u, v)) == 1) != want_boundary:
                    continue
                if self._legal(u, v, p):
                    self._collapse(u, v, p)
                    return

    def _rescan(self) -> None:
        seen = set()
        for fi in range(len(self.faces)):
            if not self.falive[fi]:
                continue
            f = self.faces[fi]
            for u, v in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (u, v) if u < v else (v, u)
                if key not in seen:
                    seen.add(key)
                    self._push(*key)

    def _collapse(self, u, v, p) -> None:
        shared = self._shared_faces(u, v)
        for fi in shared:
            self.falive[fi] = 0
            for w in self.faces[fi]:
                self.vfaces[w].discard(fi)
        for fi in tuple(self.vfaces[v]):
            f = self.faces[fi]
            f[f.index(v)] = u
            self.vfaces[u].add(fi)
        self.vfaces[v].clear()
        self.pos[u] = p
        self.quad[u] = _qadd(self.quad[u], self.quad[v])
        self.vbnd[u] |= self.vbnd[v]
        self.stamp[u] += 1
        self.stamp[v] += 1
        self.n_alive -= len(shared)
        # refresh every edge of every face whose geometry this collapse touched
        seen = set()
        for fi in self.vfaces[u]:
            f = self.faces[fi]
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (a, b) if a < b else (b, a)
                if key not in seen:
                    seen.add(key)
                    self._push(*key)

    def extract(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        face_ids = [fi for fi in range(len(self.faces)) if self.falive[fi]]
        used = sorted({v for fi in face_ids for v in self.faces[fi]})
        remap = {old: new for new, old in enumerate(used)}
        verts = np.array([self.pos[v] for v in used], dtype=np.float64)
        faces = np.array([[remap[v] for v in self.faces[fi]] for fi in face_ids],
                         dtype=np.int64)
        return verts, faces, np.array(face_ids, dtype=np.int64)


def simplify(mesh: TriMesh, target_faces: int) -> BaseMesh:
    """Collapse edges until the face count reaches target_faces (within +-2)."""
    if target_faces < 4:
        raise ValueError("target_faces must be at least 4")
    if target_faces > mesh.n_faces:
        raise ValueError(
            f"target_faces {target_faces} above current count {mesh.n_faces}")
    if target_faces == mesh.n_faces:
        return BaseMesh(mesh.copy(), np.arange(mesh.n_faces), mesh, 0.0)
    collapser = _Collapser(mesh)
    collapser.run(target_faces)
    verts, faces, provenance = collapser.extract()
    out = TriMesh(verts, faces)
    hausdorff = float(SurfaceIndex(mesh).distance(verts).max())
    return BaseMesh(out, provenance, mesh, hausdorff)
