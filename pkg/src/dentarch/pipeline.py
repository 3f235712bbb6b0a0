"""Remeshing pipelines shared by training and inference.

Two paths from a raw scan:
  patch path: repair -> simplify to the base face budget -> 3 subdivision
      levels -> patches (the transformer's input);
  point path: repair -> simplify to a lightweight face budget -> sample
      vertices (the site classifier's input).

Both run from one repaired mesh. Remeshing results are cached next to the
mesh files because the patch path costs ~1 s per case.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import (
    PatchSet,
    PointSample,
    TriMesh,
    build_patches,
    load_mesh,
    load_patchset,
    repair,
    sample_points,
    save_patchset,
    simplify,
    subdivide,
)
from .synth.dataset import CaseRecord


@dataclass
class RemeshConfig:
    base_faces: int = 500
    levels: int = 3
    point_mesh_faces: int = 9000
    n_points: int = 4096
    max_hole_edges: int = 32
    merge_tol: float = 1e-6


def mesh_to_patches(mesh: TriMesh, cfg: RemeshConfig = RemeshConfig(),
                    repaired: bool = False) -> PatchSet:
    clean = mesh if repaired else repair(mesh, cfg.merge_tol, cfg.max_hole_edges)
    base = simplify(clean, min(cfg.base_faces, clean.n_faces))
    return build_patches(subdivide(base, cfg.levels))


def mesh_to_points(mesh: TriMesh, seed: int, cfg: RemeshConfig = RemeshConfig(),
                   repaired: bool = False, mesh_id: str = "") -> PointSample:
    clean = mesh if repaired else repair(mesh, cfg.merge_tol, cfg.max_hole_edges)
    light = simplify(clean, min(cfg.point_mesh_faces, clean.n_faces))
    return sample_points(light.mesh, cfg.n_points, seed=seed, mesh_id=mesh_id)


def augment_mesh(mesh: TriMesh, seed: int, scale_range=(0.9, 1.1),
                 max_rot_deg: float = 15.0, deform_mm: float = 0.3) -> TriMesh:
    """Random uniform scale, rotation about the occlusal (z) axis, and smooth
    low-frequency vertex displacement. Applied before remeshing."""
    rng = np.random.default_rng(seed)
    v = mesh.vertices.copy()
    center = v.mean(axis=0)
    v -= center
    v *= rng.uniform(*scale_range)
    theta = np.deg2rad(rng.uniform(-max_rot_deg, max_rot_deg))
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    v = v @ rot.T
    extent = np.maximum(v.max(axis=0) - v.min(axis=0), 1e-6)
    phase = rng.uniform(0, 2 * np.pi, size=(3, 3))
    freq = rng.uniform(0.5, 1.5, size=(3, 3))
    disp = np.zeros_like(v)
    for axis in range(3):
        waves = np.sin(2 * np.pi * freq[axis] * v / extent + phase[axis])
        disp[:, axis] = waves.prod(axis=1)
    v += deform_mm * disp / max(np.abs(disp).max(), 1e-9)
    return TriMesh(v + center, mesh.faces.copy())


# -- cached per-case preparation ------------------------------------------------


def case_patches(record: CaseRecord, root, cfg: RemeshConfig = RemeshConfig(),
                 cache: bool = True) -> PatchSet:
    root = Path(root)
    mesh_file = root / record.mesh_path
    cache_file = mesh_file.with_suffix(".tmps")
    if cache and cache_file.exists():
        return load_patchset(cache_file)
    ps = mesh_to_patches(load_mesh(mesh_file), cfg)
    if cache:
        save_patchset(ps, cache_file)
    return ps


def case_points(record: CaseRecord, root, cfg: RemeshConfig = RemeshConfig(),
                seed: int = 0, cache: bool = True) -> np.ndarray:
    root = Path(root)
    mesh_file = root / record.mesh_path
    cache_file = mesh_file.with_suffix(f".pts{seed}.npy")
    if cache and cache_file.exists():
        return np.load(cache_file)
    sample = mesh_to_points(load_mesh(mesh_file), seed=seed, cfg=cfg,
                            mesh_id=record.case_id)
    if cache:
        np.save(cache_file, sample.points)
    return sample.points


def target_vector(record: CaseRecord) -> np.ndarray:
    z = np.zeros(28)
    for site in record.sites:
        z[site.slot_index] = 1.0
    return z
