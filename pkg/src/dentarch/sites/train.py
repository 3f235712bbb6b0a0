"""Training loop for the site classifier.

Each case contributes a cached point cloud and a fixed grouping plan; per
step a batch is drawn, each cloud gets a random rotation about the occlusal
axis plus a uniform scale (both leave the grouping plan valid), and the mean
BCE over the batch is minimized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import AdamW, bce
from ..nn.tensor import step_arena
from .model import SiteClassifier, SiteNetConfig


@dataclass
class SiteTrainConfig:
    steps: int = 600
    batch_size: int = 8
    base_lr: float = 2e-3
    weight_decay: float = 1e-4
    seed: int = 0
    max_rot_deg: float = 15.0
    scale_range: tuple[float, float] = (0.9, 1.1)
    augment: bool = True


def _rotate_z(points: np.ndarray, degrees: float) -> np.ndarray:
    theta = np.deg2rad(degrees)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return points @ rot.T


def train_site_classifier(clouds: list[np.ndarray], targets: list[np.ndarray],
                          net_cfg: SiteNetConfig, cfg: SiteTrainConfig,
                          model: SiteClassifier | None = None):
    """Returns (model, history of per-step mean BCE)."""
    rng = np.random.default_rng(cfg.seed)
    if model is None:
        model = SiteClassifier(net_cfg, rng)
    params = model.params()
    opt = AdamW(params, base_lr=cfg.base_lr, horizon=cfg.steps,
                weight_decay=cfg.weight_decay)
    plans = [model.compute_groups(c) for c in clouds]
    history = []
    for step in range(cfg.steps):
        idx = rng.integers(0, len(clouds), size=cfg.batch_size)
        batch_pts = []
        for i in idx:
            pts = clouds[i]
            if cfg.augment:
                pts = _rotate_z(pts, rng.uniform(-cfg.max_rot_deg,
                                                 cfg.max_rot_deg))
                pts = pts * rng.uniform(*cfg.scale_range)
            batch_pts.append(pts)
        batch_targets = np.stack([targets[i] for i in idx])
        with step_arena():
            opt.zero_grad()
            probs = model.logits_batch(
                batch_pts, [plans[i] for i in idx]).sigmoid()
            loss = bce(probs, batch_targets)
            loss.backward()
            lr = opt.step()
            history.append({"step": step, "loss": loss.item(), "lr": lr})
    return model, history
