"""Binary checkpoint container: magic "TMCK", version, named parameter table.

Layout (little-endian): magic 4s, version u32, count u32, then per entry
{name_len u32, name utf8, ndim u32, dims u32 * ndim, data f32 * prod(dims)}.
Parameters are stored as float32; loading casts back to float64.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointMismatch, ParseError
from .tensor import Tensor

MAGIC = b"TMCK"
VERSION = 1


def save_checkpoint(path, params: dict[str, Tensor]) -> None:
    chunks = [MAGIC, struct.pack("<II", VERSION, len(params))]
    for name, p in params.items():
        raw = name.encode("utf-8")
        arr = np.ascontiguousarray(p.data, dtype=np.float32)
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path) -> dict[str, np.ndarray]:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise ParseError(f"{path}: not a checkpoint file")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise ParseError(f"{path}: unsupported checkpoint version {version}")
    off = 12
    table: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", blob, off)
        off += 4
        name = blob[off:off + name_len].decode("utf-8")
        off += name_len
        (ndim,) = struct.unpack_from("<I", blob, off)
        off += 4
        shape = struct.unpack_from(f"<{ndim}I", blob, off)
        off += 4 * ndim
        n = int(np.prod(shape)) if ndim else 1
        arr = np.frombuffer(blob, dtype="<f4", count=n, offset=off)
        off += 4 * n
        table[name] = arr.reshape(shape).astype(np.float64)
    return table


def load_into(params: dict[str, Tensor], table: dict[str, np.ndarray],
              prefix: str = "", strict: bool = True) -> list[str]:
    """Copy checkpoint entries into live parameters; returns loaded names.

    With ``prefix``, only parameters whose name starts with it are touched and
    the same prefix selects checkpoint entries.
    """
    loaded = []
    for name, p in params.items():
        if prefix and not name.startswith(prefix):
            continue
        if name not in table:
            if strict:
                raise CheckpointMismatch(f"missing parameter {name}")
            continue
        src = table[name]
        if src.shape != p.data.shape:
            raise CheckpointMismatch(
                f"{name}: checkpoint {src.shape} vs model {p.data.shape}")
        p.data[...] = src
        loaded.append(name)
    return loaded
