"""Exception types shared across the package."""


class DentarchError(Exception):
    """Base class for all package errors."""


class ParseError(DentarchError):
    """Malformed mesh file."""


class DegenerateMesh(DentarchError):
    """Mesh has no usable faces."""


class IrreparableMesh(DentarchError):
    """Manifoldness unreachable after vertex merging and hole filling."""


class SimplifyStall(DentarchError):
    """No legal edge collapse remains above the target face count."""


class ShapeMismatch(DentarchError):
    """Tensor shapes incompatible for the requested operation."""


class NonFiniteValue(DentarchError):
    """NaN or Inf produced at an op boundary in checked mode."""


class EmptySet(DentarchError):
    """Point set argument has no points."""


class SiteOutOfRange(DentarchError):
    """Tooth slot index outside 0..27."""


class SystemOutOfRange(DentarchError):
    """Implant system id outside 0..12."""


class NoActiveSlot(DentarchError):
    """Regression loss requested with every slot inactive."""


class LengthMismatch(DentarchError):
    """Prediction and ground-truth lists have different lengths."""


class MissingCase(DentarchError):
    """Case id present in one input but not the other."""


class CheckpointMismatch(DentarchError):
    """Checkpoint parameter shapes disagree with the model."""
