"""Reconstruction objective for masked patches.

Geometry term: mean over masked patches of the two-sided Chamfer distance
between predicted and ground-truth centroid-relative vertex sets. Feature
term: mean over the faces of the masked patches of the squared L2 distance
between predicted and ground-truth 13-d descriptors. Total is
geometry + weight * features.

All patches share the same vertex count, so the per-patch Chamfer mean equals
a flat mean over (patch, vertex) pairs; nearest neighbors are found in one
batched numpy pass and held fixed, keeping the tape small.
"""

from __future__ import annotations

import numpy as np

from ..nn import Tensor
from ..nn.tensor import as_tensor, _empty as arena_empty


def reconstruction_loss(pred_verts: Tensor, pred_feats: Tensor,
                        gt_verts: np.ndarray, gt_feats: np.ndarray,
                        feat_weight: float) -> tuple[Tensor, Tensor, Tensor]:
    """Returns (total, geometry, features); zeros when nothing is masked."""
    n = pred_verts.shape[0]
    if n == 0:
        zero = Tensor(0.0)
        return zero, zero, zero
    np_, nq = pred_verts.shape[1], gt_verts.shape[1]
    diff = np.subtract(pred_verts.data[:, :, None, :], gt_verts[:, None, :, :],
                       out=arena_empty((n, np_, nq, 3)))
    np.multiply(diff, diff, out=diff)
    d2 = diff.sum(axis=-1, out=arena_empty((n, np_, nq)))
    nearest_gt = d2.argmin(axis=2)    # (n, 45) per predicted vertex
    nearest_pred = d2.argmin(axis=1)  # (n, 45) per ground-truth vertex
    rows = np.arange(n)[:, None]
    gt_t = as_tensor(gt_verts)
    term_pg = (pred_verts - gt_verts[rows, nearest_gt]).rownorm().mean()
    term_gp = (pred_verts[rows, nearest_pred] - gt_t).rownorm().mean()
    geo = term_pg + term_gp

    diff = pred_feats - as_tensor(gt_feats)
    feat = diff.square().sum(axis=-1).reshape(-1).mean()
    return geo + feat_weight * feat, geo, feat
