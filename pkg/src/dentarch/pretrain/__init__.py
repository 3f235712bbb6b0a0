from .model import EncoderConfig, MaskRecord, MeshEncoder, MaskedAutoencoder, mask_tokens
from .losses import reconstruction_loss
from .train import PretrainConfig, pretrain

__all__ = [
    "EncoderConfig",
    "MeshEncoder",
    "MaskedAutoencoder",
    "MaskRecord",
    "mask_tokens",
    "reconstruction_loss",
    "PretrainConfig",
    "pretrain",
]
