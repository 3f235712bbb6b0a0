"""Loss functions.

`chamfer` is the two-sided mean of non-squared nearest-neighbor distances;
the nearest-neighbor assignment is computed from the current values and held
fixed, so gradients flow through the matched pairs only.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptySet, ShapeMismatch
from .tensor import Tensor, as_tensor


def chamfer(pred: Tensor, gt) -> Tensor:
    """Two-sided mean nearest-neighbor distance between point sets (P,3), (Q,3)."""
    pred = as_tensor(pred)
    gt = as_tensor(gt)
    p, q = pred.data, gt.data
    if p.shape[0] == 0 or q.shape[0] == 0:
        raise EmptySet("chamfer needs non-empty point sets")
    d2 = ((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=-1)
    nearest_gt = d2.argmin(axis=1)   # for each pred point
    nearest_pred = d2.argmin(axis=0)  # for each gt point
    term_pq = (pred - gt[nearest_gt]).rownorm().mean()
    term_qp = (pred[nearest_pred] - gt).rownorm().mean()
    return term_pq + term_qp


def mse(pred: Tensor, gt) -> Tensor:
    """Mean squared error over vector components: (1/d) * ||pred - gt||^2."""
    pred = as_tensor(pred)
    gt = as_tensor(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatch(f"mse {pred.shape} vs {gt.shape}")
    return (pred - gt).square().mean()


def smooth_l1(u: Tensor, delta: float = 1.0) -> Tensor:
    """Elementwise smooth-L1 (quadratic below delta, linear above), summed."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    u = as_tensor(u)
    inside = (np.abs(u.data) < delta).astype(np.float64)
    sign = np.sign(u.data)
    quad = u.square() * (0.5 / delta)
    lin = u * sign - 0.5 * delta
    return (quad * inside + lin * (1.0 - inside)).sum()


def bce(pred: Tensor, target, clamp: float = 1e-7) -> Tensor:
    """Mean binary cross-entropy; probabilities clamped away from 0 and 1."""
    pred = as_tensor(pred)
    z = np.asarray(target, dtype=np.float64)
    if pred.shape != z.shape:
        raise ShapeMismatch(f"bce {pred.shape} vs {z.shape}")
    lo, hi = clamp, 1.0 - clamp
    inside = ((pred.data > lo) & (pred.data < hi)).astype(np.float64)
    clipped = pred * inside + (1.0 - inside) * np.clip(pred.data, lo, hi)
    terms = clipped.log() * z + (1.0 - clipped).log() * (1.0 - z)
    return -terms.mean()
