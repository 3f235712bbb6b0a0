"""Binary patch container: magic "TMPS", version u32, patch_count u32, then
per patch 64x13 f32 descriptors, 45x3 f32 relative vertices, 3 f32 centroid.
Little-endian throughout."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .subdivide import DESCRIPTOR_DIM, PATCH_FACES, PATCH_VERTICES, PatchSet

MAGIC = b"TMPS"
VERSION = 1

_PATCH_FLOATS = PATCH_FACES * DESCRIPTOR_DIM + PATCH_VERTICES * 3 + 3


def save_patchset(ps: PatchSet, path) -> None:
    n = len(ps)
    body = np.empty((n, _PATCH_FLOATS), dtype="<f4")
    body[:, :PATCH_FACES * DESCRIPTOR_DIM] = ps.descriptors.reshape(n, -1)
    body[:, PATCH_FACES * DESCRIPTOR_DIM:-3] = ps.rel_vertices.reshape(n, -1)
    body[:, -3:] = ps.centroids
    Path(path).write_bytes(
        MAGIC + struct.pack("<II", VERSION, n) + body.tobytes())


def load_patchset(path) -> PatchSet:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise ParseError(f"{path}: not a patch container")
    version, n = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise ParseError(f"{path}: unsupported version {version}")
    expected = 12 + n * _PATCH_FLOATS * 4
    if len(blob) != expected:
        raise ParseError(f"{path}: size {len(blob)} != expected {expected}")
    body = np.frombuffer(blob, dtype="<f4", offset=12).reshape(n, _PATCH_FLOATS)
    return PatchSet(
        descriptors=body[:, :PATCH_FACES * DESCRIPTOR_DIM]
        .astype(np.float64).reshape(n, PATCH_FACES, DESCRIPTOR_DIM),
        rel_vertices=body[:, PATCH_FACES * DESCRIPTOR_DIM:-3]
        .astype(np.float64).reshape(n, PATCH_VERTICES, 3),
        centroids=body[:, -3:].astype(np.float64),
    )
