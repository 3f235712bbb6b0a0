"""Self-supervised pretraining loop."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..mesh.subdivide import PatchSet
from ..nn import AdamW, save_checkpoint
from ..nn.tensor import step_arena
from .losses import reconstruction_loss
from .model import EncoderConfig, MaskedAutoencoder, mask_tokens


@dataclass
class PretrainConfig:
    steps: int = 200
    batch_size: int = 4       # fits the 2-core box; raise on wider machines
    base_lr: float = 1e-3     # paper-scale default is 1e-4 over 500 epochs
    weight_decay: float = 0.01
    seed: int = 0


def pretrain(patchsets: list[PatchSet], enc_cfg: EncoderConfig,
             cfg: PretrainConfig, ckpt_path=None, log_path=None,
             model: MaskedAutoencoder | None = None):
    """Train a masked autoencoder on cached patch sets.

    Returns (model, history); history rows are dicts with step, losses, lr.
    """
    rng = np.random.default_rng(cfg.seed)
    if model is None:
        model = MaskedAutoencoder(enc_cfg, rng)
    params = model.params()
    opt = AdamW(params, base_lr=cfg.base_lr, horizon=cfg.steps,
                weight_decay=cfg.weight_decay)
    history = []
    for step in range(cfg.steps):
        idx = rng.integers(0, len(patchsets), size=cfg.batch_size)
        batch = [patchsets[i] for i in idx]
        records = [mask_tokens(len(ps), enc_cfg.mask_ratio,
                               seed=int(rng.integers(0, 2**31)))
                   for ps in batch]
        gt_verts = np.concatenate(
            [ps.rel_vertices[r.masked] for ps, r in zip(batch, records)])
        gt_feats = np.concatenate(
            [ps.descriptors[r.masked] for ps, r in zip(batch, records)])
        with step_arena():
            opt.zero_grad()
            pv, pf = model.forward_batch(batch, records)
            n_masked = len(records[0].masked)
            loss, lg, lf = reconstruction_loss(
                pv.reshape(cfg.batch_size * n_masked, -1, 3), pf.reshape(
                    cfg.batch_size * n_masked, *pf.shape[2:]),
                gt_verts, gt_feats, enc_cfg.feat_weight)
            loss.backward()
            lr = opt.step()
            history.append({"step": step, "l_rec": loss.item(),
                            "l_geo": lg.item(), "l_feat": lf.item(), "lr": lr})
    if ckpt_path is not None:
        save_checkpoint(ckpt_path, params)
    if log_path is not None:
        with Path(log_path).open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["step", "l_rec", "l_geo",
                                                    "l_feat", "lr"])
            writer.writeheader()
            writer.writerows(history)
    return model, history
