"""Synthetic dental arch surfaces.

A case is a parametric gum-ridge sheet following a parabolic arch with 14
tooth-like protrusions; requested missing positions get a smooth gingival
saddle instead of a bump. Geometry is jittered per seed (arch proportions,
global scale, bump amplitudes, tooth centers, low-frequency displacement) so
held-out generalization is meaningful while the site/params mapping stays
learnable.

All quantities are millimeters. Generation is a pure function of
(jaw, missing, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from ..mesh.core import TriMesh
from .fdi import FdiSite, jaw_sites

# mesiodistal crown widths by FDI position 1..7 (index 0 unused)
TOOTH_WIDTH_MM = {
    "upper": (0.0, 8.5, 6.5, 7.6, 7.2, 6.8, 10.4, 9.8),
    "lower": (0.0, 5.3, 5.9, 6.8, 7.0, 7.1, 11.2, 10.5),
}
# visible crown height by position 1..7
CROWN_HEIGHT_MM = {
    "upper": (0.0, 7.6, 7.1, 7.8, 6.6, 6.3, 6.0, 5.8),
    "lower": (0.0, 7.0, 7.2, 7.9, 6.9, 6.5, 6.1, 5.9),
}
ARCH_SHAPE = {  # half-width a, depth d of the parabola y = d*(1-(x/a)^2)
    "upper": (30.0, 42.0),
    "lower": (27.5, 37.0),
}
RIDGE_HEIGHT_MM = {"upper": 3.0, "lower": 2.5}
RIDGE_HALF_WIDTH_MM = {"upper": 5.5, "lower": 5.0}
SADDLE_DEPTH_MM = 1.1

GRID_ALONG = 170
GRID_ACROSS = 38


@dataclass
class ArchCase:
    mesh: TriMesh
    jaw: str
    missing: tuple[FdiSite, ...]
    vertex_labels: np.ndarray      # (n,) nearest tooth arch-ordinal 0..13
    vertex_arc: np.ndarray         # (n,) arclength coordinate per vertex
    vertex_t: np.ndarray           # (n,) cross coordinate in [-1, 1]
    tooth_arc: np.ndarray          # (14,) tooth center arclength positions
    arc_length: float
    saddle_depth: dict[FdiSite, float]
    crown_ref: dict[FdiSite, float]

    def site_peak_heights(self, half_window: float = 2.0) -> np.ndarray:
        """Max vertex height near each tooth center; the raw gum-height feature."""
        near_ridge = np.abs(self.vertex_t) < 0.45
        z = self.mesh.vertices[:, 2]
        heights = np.zeros(len(self.tooth_arc))
        for i, s in enumerate(self.tooth_arc):
            sel = near_ridge & (np.abs(self.vertex_arc - s) < half_window)
            heights[i] = z[sel].max() if sel.any() else 0.0
        return heights


def _arch_ordering(jaw: str):
    sites = jaw_sites(jaw)
    widths = np.array([TOOTH_WIDTH_MM[jaw][s.position] for s in sites])
    crowns = np.array([CROWN_HEIGHT_MM[jaw][s.position] for s in sites])
    return sites, widths, crowns


def generate_arch_case(jaw: str, missing, seed: int) -> ArchCase:
    if jaw not in ("upper", "lower"):
        raise ValueError(f"jaw must be upper or lower, got {jaw!r}")
    missing = tuple(sorted(set(missing)))
    if len(missing) > 3:
        raise ValueError("at most 3 missing sites per case")
    for site in missing:
        if site.jaw != jaw:
            raise ValueError(f"site {site.code} not in the {jaw} jaw")
    rng = np.random.default_rng(seed)

    a0, d0 = ARCH_SHAPE[jaw]
    scale = rng.uniform(0.95, 1.05)
    a = a0 * rng.uniform(0.96, 1.04) * scale
    d = d0 * rng.uniform(0.96, 1.04) * scale

    # arclength-parametrized centerline
    u = np.linspace(-1.0, 1.0, 2001)
    cx, cy = a * u, d * (1.0 - u * u)
    seg = np.hypot(np.diff(cx), np.diff(cy))
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]

    sites, widths, crowns = _arch_ordering(jaw)
    widths = widths * (0.95 * total / widths.sum())
    centers = (total - widths.sum()) / 2 + np.cumsum(widths) - widths / 2
    centers = centers + rng.uniform(-0.25, 0.25, size=14) * scale
    amps = crowns * rng.uniform(0.92, 1.08, size=14) * scale
    sigmas = widths * 0.30

    missing_ordinals = {s.arch_ordinal for s in missing}
    saddle: dict[FdiSite, float] = {}
    crown_ref: dict[FdiSite, float] = {}
    depth_amp = np.zeros(14)
    for site in missing:
        i = site.arch_ordinal
        depth_amp[i] = SADDLE_DEPTH_MM * rng.uniform(0.7, 1.3) * scale
        saddle[site] = float(depth_amp[i])
        neighbors = [j for j in (i - 1, i + 1)
                     if 0 <= j < 14 and j not in missing_ordinals]
        crown_ref[site] = float(np.mean([amps[j] for j in neighbors])
                                if neighbors else amps[i])

    # surface grid over (arclength, cross coordinate)
    s_grid = np.linspace(0.0, total, GRID_ALONG)
    t_grid = np.linspace(-1.0, 1.0, GRID_ACROSS)
    S, T = np.meshgrid(s_grid, t_grid, indexing="ij")

    su = np.interp(s_grid, arc, u)
    px = a * su
    py = d * (1.0 - su * su)
    # outward normal of the centerline in the xy plane
    tx, ty = np.gradient(px), np.gradient(py)
    tlen = np.hypot(tx, ty)
    nx, ny = ty / tlen, -tx / tlen

    hw = RIDGE_HALF_WIDTH_MM[jaw] * scale
    X = px[:, None] + nx[:, None] * (T * hw)
    Y = py[:, None] + ny[:, None] * (T * hw)

    dome = np.maximum(0.0, 1.0 - T * T)
    Z = RIDGE_HEIGHT_MM[jaw] * scale * dome
    bump_cross = dome ** 1.2
    for i in range(14):
        g = np.exp(-((S - centers[i]) / sigmas[i]) ** 2)
        if i in missing_ordinals:
            Z -= depth_amp[i] * g * dome
        else:
            Z += amps[i] * g * bump_cross

    # low-frequency displacement keeps cases from being exact replicas
    f1 = rng.uniform(2.0, 4.0)
    f2 = rng.integers(1, 3)
    ph1, ph2 = rng.uniform(0, 2 * np.pi, size=2)
    Z += 0.15 * scale * np.sin(2 * np.pi * f1 * S / total + ph1) \
        * np.sin(np.pi * f2 * (T + 1) / 2 + ph2)

    verts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    faces = []
    nw = GRID_ACROSS
    for i in range(GRID_ALONG - 1):
        for j in range(nw - 1):
            v0 = i * nw + j
            v1 = v0 + 1
            v2 = v0 + nw
            v3 = v2 + 1
            faces.append((v0, v2, v1))
            faces.append((v1, v2, v3))
    mesh = TriMesh(verts, np.asarray(faces, dtype=np.int64))

    vertex_arc = S.ravel()
    vertex_t = T.ravel()
    labels = np.abs(vertex_arc[:, None] - centers[None, :]).argmin(axis=1)

    return ArchCase(
        mesh=mesh,
        jaw=jaw,
        missing=missing,
        vertex_labels=labels.astype(np.int64),
        vertex_arc=vertex_arc,
        vertex_t=vertex_t,
        tooth_arc=centers,
        arc_length=float(total),
        saddle_depth=saddle,
        crown_ref=crown_ref,
    )


def generate_arch(jaw: str, missing, seed: int) -> TriMesh:
    """Mesh-only view of generate_arch_case."""
    return generate_arch_case(jaw, missing, seed).mesh


def count_protrusions(case: ArchCase, prominence: float = 1.5) -> int:
    """Count tooth-like local maxima of the ridge height profile.

    Works from mesh vertices near the ridge centerline, binned along the arch,
    so it checks the generated geometry rather than the generator's intent.
    """
    near = np.abs(case.vertex_t) < 0.4
    s = case.vertex_arc[near]
    z = case.mesh.vertices[near, 2]
    bins = np.arange(0.0, case.arc_length + 1.0, 1.0)
    idx = np.digitize(s, bins)
    profile = np.full(len(bins) + 1, -np.inf)
    np.maximum.at(profile, idx, z)
    profile = profile[np.isfinite(profile)]
    peaks, _ = find_peaks(profile, prominence=prominence)
    return int(len(peaks))
