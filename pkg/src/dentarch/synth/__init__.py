from .fdi import ALL_SITES, FdiSite, arch_distance
from .arch import ArchCase, count_protrusions, generate_arch, generate_arch_case
from .systems import N_SYSTEMS, synthesize_params, system_table
from .dataset import CaseRecord, DatasetManifest, build_dataset, load_manifest

__all__ = [
    "FdiSite",
    "ALL_SITES",
    "arch_distance",
    "ArchCase",
    "generate_arch",
    "generate_arch_case",
    "count_protrusions",
    "N_SYSTEMS",
    "system_table",
    "synthesize_params",
    "CaseRecord",
    "DatasetManifest",
    "build_dataset",
    "load_manifest",
]
