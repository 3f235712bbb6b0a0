"""Labeled synthetic dataset builder and JSON-lines manifest I/O.

Manifest records are one JSON object per line with fields exactly
{id, jaw, mesh, sites[], system, params[][3], split}; mesh files are OBJ,
paths relative to the manifest location.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..mesh.core import save_mesh
from .arch import generate_arch_case
from .fdi import FdiSite, jaw_sites
from .systems import N_SYSTEMS, synthesize_params

GENERATOR_VERSION = 1


@dataclass
class CaseRecord:
    case_id: str
    jaw: str
    mesh_path: str
    sites: tuple[FdiSite, ...]       # canonical slot order
    system_id: int
    params: tuple[tuple[float, float, float], ...]  # per site, aligned
    split: str

    def __post_init__(self):
        if len(self.sites) > 3:
            raise ValueError("at most 3 implant sites per case")
        if not 0 <= self.system_id < N_SYSTEMS:
            raise ValueError(f"system id {self.system_id} out of range")
        order = np.argsort([s.slot_index for s in self.sites])
        self.sites = tuple(self.sites[i] for i in order)
        self.params = tuple(tuple(map(float, self.params[i])) for i in order)
        for triple in self.params:
            if not all(np.isfinite(x) and x > 0 for x in triple):
                raise ValueError(f"bad parameter triple {triple}")

    def to_json(self) -> str:
        return json.dumps({
            "id": self.case_id,
            "jaw": self.jaw,
            "mesh": self.mesh_path,
            "sites": [s.code for s in self.sites],
            "system": self.system_id,
            "params": [list(t) for t in self.params],
            "split": self.split,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CaseRecord":
        obj = json.loads(line)
        return cls(
            case_id=obj["id"],
            jaw=obj["jaw"],
            mesh_path=obj["mesh"],
            sites=tuple(FdiSite(c) for c in obj["sites"]),
            system_id=obj["system"],
            params=tuple(tuple(t) for t in obj["params"]),
            split=obj["split"],
        )


@dataclass
class DatasetManifest:
    split: str
    records: list[CaseRecord]
    seed: int
    version: int = GENERATOR_VERSION

    def save(self, path) -> None:
        lines = [json.dumps({"split": self.split, "seed": self.seed,
                             "version": self.version, "header": True},
                            sort_keys=True)]
        lines += [r.to_json() for r in self.records]
        Path(path).write_text("\n".join(lines) + "\n")


def load_manifest(path) -> DatasetManifest:
    lines = Path(path).read_text().splitlines()
    head = json.loads(lines[0])
    records = [CaseRecord.from_json(ln) for ln in lines[1:] if ln.strip()]
    return DatasetManifest(split=head["split"], records=records,
                           seed=head["seed"], version=head["version"])


def _case_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1)[0])


def build_case(index: int, n_sites: int, seed: int, split: str,
               out_dir: Path, write_mesh: bool = True):
    """Generate one labeled case; returns (CaseRecord, ArchCase)."""
    case_seed = _case_seed(seed, index)
    rng = np.random.default_rng(case_seed)
    jaw = "upper" if rng.random() < 0.5 else "lower"
    pool = jaw_sites(jaw)
    picks = rng.choice(len(pool), size=n_sites, replace=False)
    missing = tuple(sorted((pool[i] for i in picks), key=lambda s: s.slot_index))
    system_id = int(rng.integers(0, N_SYSTEMS))
    case = generate_arch_case(jaw, missing, case_seed)
    params = tuple(
        synthesize_params(site, system_id, case_seed,
                          saddle_depth_mm=case.saddle_depth[site],
                          crown_ref_mm=case.crown_ref[site])
        for site in missing)
    case_id = f"{split}-{index:05d}"
    mesh_name = f"{case_id}.obj"
    if write_mesh:
        save_mesh(case.mesh, out_dir / mesh_name)
    record = CaseRecord(case_id=case_id, jaw=jaw, mesh_path=mesh_name,
                        sites=missing, system_id=system_id, params=params,
                        split=split)
    return record, case


def build_dataset(n_single: int, n_multi: int, seed: int, out_dir,
                  split: str = "train") -> DatasetManifest:
    """Write meshes and a manifest: n_single one-site cases followed by
    n_multi cases with 2-3 sites."""
    if n_single < 0 or n_multi < 0:
        raise ValueError("counts must be non-negative")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(n_single + n_multi):
        if i < n_single:
            n_sites = 1
        else:
            n_sites = 2 + int(np.random.default_rng(_case_seed(seed, i)).integers(0, 2))
        record, _ = build_case(i, n_sites, seed, split, out_dir)
        records.append(record)
    manifest = DatasetManifest(split=split, records=records, seed=seed)
    manifest.save(out_dir / f"manifest-{split}.jsonl")
    return manifest
