from .core import TriMesh, load_mesh, save_mesh
from .repair import repair
from .simplify import BaseMesh, simplify
from .subdivide import PatchSet, RefinedMesh, build_patches, subdivide
from .sampling import PointSample, sample_points
from .patchio import load_patchset, save_patchset

__all__ = [
    "TriMesh",
    "load_mesh",
    "save_mesh",
    "repair",
    "BaseMesh",
    "simplify",
    "RefinedMesh",
    "subdivide",
    "PatchSet",
    "build_patches",
    "PointSample",
    "sample_points",
    "save_patchset",
    "load_patchset",
]
