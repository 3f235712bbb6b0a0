from .tensor import Tensor, concat, gather_rows, set_checked_mode
from .layers import (
    Embedding,
    LayerNorm,
    Linear,
    Mlp,
    Module,
    MultiHeadSelfAttention,
    TransformerBlock,
)
from .losses import bce, chamfer, mse, smooth_l1
from .optim import AdamW, cosine_lr
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import gradcheck

__all__ = [
    "Tensor",
    "concat",
    "gather_rows",
    "set_checked_mode",
    "Module",
    "Linear",
    "LayerNorm",
    "Mlp",
    "MultiHeadSelfAttention",
    "TransformerBlock",
    "Embedding",
    "chamfer",
    "mse",
    "smooth_l1",
    "bce",
    "AdamW",
    "cosine_lr",
    "save_checkpoint",
    "load_checkpoint",
    "gradcheck",
]
