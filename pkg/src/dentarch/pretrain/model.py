"""Patch tokenizer, transformer mesh encoder, and the masked autoencoder.

Tokens are per-patch: flattened 64x13 descriptors through a 2-layer MLP plus
a 2-layer MLP of the 3-d patch centroid as positional embedding. The encoder
runs on visible tokens only; the decoder sees the full sequence in original
order with a shared learnable embedding standing in at masked slots,
positional embeddings re-added everywhere. Two heads reconstruct each masked
patch: 45 centroid-relative vertices and 64x13 face descriptors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatch
from ..mesh.subdivide import DESCRIPTOR_DIM, PATCH_FACES, PATCH_VERTICES, PatchSet
from ..nn import Tensor, concat
from ..nn.layers import LayerNorm, Mlp, Module, TransformerBlock

TOKEN_IN = PATCH_FACES * DESCRIPTOR_DIM  # 832


@dataclass
class EncoderConfig:
    dim: int = 64
    encoder_blocks: int = 4   # paper-scale: 12
    decoder_blocks: int = 2   # paper-scale: 6
    heads: int | None = None  # defaults to dim // 16
    mlp_ratio: int = 4
    mask_ratio: float = 0.5
    feat_weight: float = 0.5  # weight of the face-feature term
    pooling: str = "mean"     # "mean" or "token"

    def __post_init__(self):
        if self.encoder_blocks < 1 or self.decoder_blocks < 1:
            raise ValueError("block counts must be >= 1")
        if not 0.0 < self.mask_ratio < 1.0:
            raise ValueError("mask ratio must lie in (0, 1)")
        if self.feat_weight < 0.0:
            raise ValueError("feature loss weight must be >= 0")
        if self.pooling not in ("mean", "token"):
            raise ValueError(f"unknown pooling {self.pooling!r}")


@dataclass
class MaskRecord:
    masked: np.ndarray   # sorted indices of masked patches
    visible: np.ndarray  # sorted indices of visible patches (original order)
    total: int


def mask_tokens(n_patches: int, ratio: float, seed: int) -> MaskRecord:
    """Mask round(ratio * n) patches uniformly at random; deterministic per seed."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("mask ratio must lie in (0, 1)")
    n_masked = int(round(ratio * n_patches))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_patches)
    masked = np.sort(perm[:n_masked])
    visible = np.sort(perm[n_masked:])
    return MaskRecord(masked=masked, visible=visible, total=n_patches)


class PatchTokenizer(Module):
    def __init__(self, dim: int, rng: np.random.Generator):
        self.desc = Mlp((TOKEN_IN, dim, dim), rng)
        self.pos = Mlp((3, dim, dim), rng)

    def embed(self, desc_flat: Tensor, centroids: Tensor) -> tuple[Tensor, Tensor]:
        emb = self.desc(desc_flat)
        pos = self.pos(centroids)
        return emb + pos, pos

    def __call__(self, ps: PatchSet) -> tuple[Tensor, Tensor]:
        """(tokens with positions added, positions) for all patches."""
        n = len(ps)
        if n == 0:
            raise ShapeMismatch("empty patch set")
        flat = ps.descriptors.reshape(n, TOKEN_IN)
        return self.embed(Tensor(flat), Tensor(ps.centroids))


class MeshEncoder(Module):
    """Tokenizer plus pre-norm transformer stack; the downstream trunk."""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        dim = cfg.dim
        heads = cfg.heads or max(1, dim // 16)
        self.tokenizer = PatchTokenizer(dim, rng)
        self.blocks = [TransformerBlock(dim, rng, heads, cfg.mlp_ratio)
                       for _ in range(cfg.encoder_blocks)]
        self.norm = LayerNorm(dim)
        self.pool_token = (Tensor(rng.normal(0.0, 0.02, size=(1, dim)),
                                  requires_grad=True)
                           if cfg.pooling == "token" else None)
        self._pooling = cfg.pooling

    def run_blocks(self, x: Tensor) -> Tensor:
        for block in self.blocks:
            x = block(x)
        return self.norm(x)

    def encode_scan(self, ps: PatchSet) -> Tensor:
        """Global mesh feature from the full (unmasked) token sequence."""
        tokens, _ = self.tokenizer(ps)
        if self._pooling == "token":
            x = self.run_blocks(concat([self.pool_token, tokens], axis=0))
            return x[0]
        return self.run_blocks(tokens).mean(axis=0)


class MaskedAutoencoder(Module):
    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        dim = cfg.dim
        heads = cfg.heads or max(1, dim // 16)
        self.encoder = MeshEncoder(cfg, rng)
        self.mask_embed = Tensor(rng.normal(0.0, 0.02, size=(1, dim)),
                                 requires_grad=True)
        self.decoder_blocks = [TransformerBlock(dim, rng, heads, cfg.mlp_ratio)
                               for _ in range(cfg.decoder_blocks)]
        self.decoder_norm = LayerNorm(dim)
        self.vertex_head = Mlp((dim, dim, PATCH_VERTICES * 3), rng)
        self.feat_head = Mlp((dim, dim, TOKEN_IN), rng)

    def forward(self, ps: PatchSet, record: MaskRecord) -> tuple[Tensor, Tensor]:
        """Per-masked-patch predictions: (n_masked, 45, 3) and (n_masked, 64, 13)."""
        if record.total != len(ps):
            raise ShapeMismatch("mask record does not match patch set")
        n_masked = len(record.masked)
        if n_masked == 0:
            return Tensor(np.zeros((0, PATCH_VERTICES, 3))), \
                Tensor(np.zeros((0, PATCH_FACES, DESCRIPTOR_DIM)))
        tokens, pos = self.encoder.tokenizer(ps)
        encoded = self.encoder.run_blocks(tokens[record.visible])

        pos_vis = pos[record.visible]
        pos_masked = pos[record.masked]
        dec_in = concat([encoded + pos_vis,
                         self.mask_embed + pos_masked], axis=0)
        # restore original patch order for the decoder
        order = np.concatenate([record.visible, record.masked])
        inverse = np.argsort(order, kind="stable")
        x = dec_in[inverse]
        for block in self.decoder_blocks:
            x = block(x)
        x = self.decoder_norm(x)
        hidden = x[record.masked]
        verts = self.vertex_head(hidden).reshape(n_masked, PATCH_VERTICES, 3)
        feats = self.feat_head(hidden).reshape(n_masked, PATCH_FACES, DESCRIPTOR_DIM)
        return verts, feats

    def forward_batch(self, patchsets: list[PatchSet],
                      records: list[MaskRecord]) -> tuple[Tensor, Tensor]:
        """Batched forward over cases with equal patch and mask counts.

        Returns (B, n_masked, 45, 3) and (B, n_masked, 64, 13) predictions,
        identical to per-case forward up to float summation order.
        """
        b = len(patchsets)
        n = len(patchsets[0])
        n_masked = len(records[0].masked)
        if any(len(ps) != n for ps in patchsets) or \
                any(len(r.masked) != n_masked for r in records):
            raise ShapeMismatch("batched forward needs uniform patch/mask counts")
        flat = np.stack([ps.descriptors.reshape(n, TOKEN_IN) for ps in patchsets])
        cents = np.stack([ps.centroids for ps in patchsets])
        tokens, pos = self.encoder.tokenizer.embed(Tensor(flat), Tensor(cents))

        rows = np.arange(b)[:, None]
        vis = np.stack([r.visible for r in records])
        msk = np.stack([r.masked for r in records])
        encoded = self.encoder.run_blocks(tokens[rows, vis])

        dec_in = concat([encoded + pos[rows, vis],
                         self.mask_embed + pos[rows, msk]], axis=1)
        order = np.concatenate([vis, msk], axis=1)
        inverse = np.argsort(order, axis=1, kind="stable")
        x = dec_in[rows, inverse]
        for block in self.decoder_blocks:
            x = block(x)
        x = self.decoder_norm(x)
        hidden = x[rows, msk]
        verts = self.vertex_head(hidden).reshape(b, n_masked, PATCH_VERTICES, 3)
        feats = self.feat_head(hidden).reshape(b, n_masked, PATCH_FACES,
                                               DESCRIPTOR_DIM)
        return verts, feats
