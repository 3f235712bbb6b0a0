"""Multi-label implant-site classifier over sampled point sets.

Three hierarchical set-abstraction levels with multi-scale grouping: farthest
point sampling picks centroids, ball queries gather neighborhoods at several
radii, a shared MLP plus max-pool summarizes each group, and the last level
pools globally into one feature vector feeding a 3-layer sigmoid head over
the 28 tooth positions.

Everything is a deterministic function of the point SET: farthest-point
selection starts from the lexicographically smallest point and breaks
distance ties lexicographically, and pooling is order-free, so permuting the
input leaves the output unchanged.

Input clouds are centered at their centroid and scaled to a unit bounding
sphere; grouping radii are given in millimeters and divided by the same
scale, keeping neighborhood sizes anatomically meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatch
from ..nn import Tensor, concat
from ..nn.layers import Mlp, Module
from ..synth.fdi import FdiSite, N_SITES


@dataclass
class AbstractionLevel:
    centroids: int
    radii_mm: tuple[float, ...]
    samples: tuple[int, ...]
    mlp_widths: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if list(self.radii_mm) != sorted(self.radii_mm) or \
                len(set(self.radii_mm)) != len(self.radii_mm):
            raise ValueError("radii must be strictly increasing")
        if not (len(self.radii_mm) == len(self.samples) == len(self.mlp_widths)):
            raise ValueError("per-scale fields must align")


def _default_levels():
    return (
        AbstractionLevel(512, (2.0, 4.0), (12, 24), ((32, 32), (32, 32))),
        AbstractionLevel(128, (4.0, 8.0), (12, 24), ((64, 64), (64, 64))),
        AbstractionLevel(1, (), (), ()),
    )


@dataclass
class SiteNetConfig:
    levels: tuple = field(default_factory=_default_levels)
    global_widths: tuple[int, ...] = (128, 256)
    head_hidden: tuple[int, int] = (128, 64)
    threshold: float = 0.5

    def __post_init__(self):
        if len(self.levels) != 3:
            raise ValueError("exactly 3 set-abstraction levels required")

    @property
    def global_dim(self) -> int:
        return self.global_widths[-1]


@dataclass
class SitePrediction:
    probabilities: np.ndarray  # (28,)
    threshold: float = 0.5

    @property
    def binarized(self) -> np.ndarray:
        return (self.probabilities > self.threshold).astype(np.int64)

    @property
    def sites(self) -> tuple[FdiSite, ...]:
        return tuple(FdiSite.from_slot(int(i))
                     for i in np.flatnonzero(self.binarized))


def _lex_smallest(points: np.ndarray) -> int:
    order = np.lexsort((points[:, 2], points[:, 1], points[:, 0]))
    return int(order[0])


def farthest_point_indices(points: np.ndarray, count: int) -> np.ndarray:
    """Deterministic FPS: start at the lexicographically smallest point,
    break max-distance ties lexicographically."""
    n = len(points)
    if count >= n:
        return np.arange(n)
    chosen = np.empty(count, dtype=np.int64)
    chosen[0] = _lex_smallest(points)
    dist = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for i in range(1, count):
        m = dist.max()
        ties = np.flatnonzero(dist == m)
        nxt = ties[0] if len(ties) == 1 else ties[_lex_smallest(points[ties])]
        chosen[i] = nxt
        d = ((points - points[nxt]) ** 2).sum(axis=1)
        np.minimum(dist, d, out=dist)
    return chosen


def ball_group_indices(points: np.ndarray, centroids: np.ndarray,
                       radius: float, k: int) -> np.ndarray:
    """(S, k) neighbor indices: the k nearest within the radius, padded with
    the nearest point when the ball holds fewer than k."""
    d2 = ((centroids[:, None, :] - points[None, :, :]) ** 2).sum(-1)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    d_sel = np.take_along_axis(d2, order, axis=1)
    inside = d_sel <= radius * radius
    nearest = order[:, :1]
    return np.where(inside, order, nearest)


class SiteClassifier(Module):
    def __init__(self, cfg: SiteNetConfig, rng: np.random.Generator):
        self.cfg = cfg
        feat_dim = 6  # relative + absolute coordinates at level 1
        self.scale_mlps: list[list[Mlp]] = []
        for level in cfg.levels[:2]:
            mlps = [Mlp((feat_dim if feat_dim == 6 else feat_dim + 3,) + widths, rng)
                    for widths in level.mlp_widths]
            # first level consumes 6-d raw coords; deeper levels add rel xyz
            self.scale_mlps.append(mlps)
            feat_dim = sum(w[-1] for w in level.mlp_widths)
        self.global_mlp = Mlp((feat_dim + 3,) + cfg.global_widths, rng)
        self.head = Mlp((cfg.global_dim,) + cfg.head_hidden + (N_SITES,), rng)

    def params(self, prefix: str = ""):  # lists of lists need explicit walk
        out = {}
        for li, mlps in enumerate(self.scale_mlps):
            for si, mlp in enumerate(mlps):
                out.update(mlp.params(f"{prefix}sa{li}.scale{si}."))
        out.update(self.global_mlp.params(f"{prefix}global."))
        out.update(self.head.params(f"{prefix}head."))
        return out

    # -- grouping (index-space, no gradients) ----------------------------------

    def compute_groups(self, points: np.ndarray):
        """Normalization and all sampling/grouping indices for one cloud.

        Rigid motions and uniform scaling leave every index unchanged, so a
        group plan computed once per case can be reused across such
        augmentations of the same cloud.
        """
        center = points.mean(axis=0)
        scale = float(np.linalg.norm(points - center, axis=1).max())
        xyz = (points - center) / scale
        plans = []
        for level in self.cfg.levels[:2]:
            fps = farthest_point_indices(xyz, level.centroids)
            cent = xyz[fps]
            balls = [ball_group_indices(xyz, cent, r / scale, k)
                     for r, k in zip(level.radii_mm, level.samples)]
            plans.append({"fps": fps, "balls": balls})
            xyz = cent
        return {"center": center, "scale": scale, "plans": plans}

    # -- forward -----------------------------------------------------------------

    def logits_batch(self, clouds: list[np.ndarray], groups: list) -> Tensor:
        """(B, 28) logits for same-size clouds with precomputed group plans."""
        b = len(clouds)
        xyz = np.stack([(c - g["center"]) / g["scale"]
                        for c, g in zip(clouds, groups)])  # (B, N, 3)
        rows3 = np.arange(b)[:, None, None]
        feats: Tensor | None = None
        for level_i, level in enumerate(self.cfg.levels[:2]):
            fps = np.stack([g["plans"][level_i]["fps"] for g in groups])
            cent = xyz[np.arange(b)[:, None], fps]         # (B, S, 3)
            scale_outs = []
            for si, mlp in enumerate(self.scale_mlps[level_i]):
                ball = np.stack([g["plans"][level_i]["balls"][si]
                                 for g in groups])          # (B, S, k)
                _, s, k = ball.shape
                grouped_xyz = xyz[rows3, ball]              # (B, S, k, 3)
                rel = grouped_xyz - cent[:, :, None, :]
                if feats is None:
                    ginp = Tensor(np.concatenate([rel, grouped_xyz], axis=-1))
                else:
                    gfeat = feats[rows3, ball]              # (B, S, k, C)
                    ginp = concat([Tensor(rel), gfeat], axis=-1)
                hidden = mlp(ginp.reshape(b * s * k, -1)).reshape(b, s, k, -1)
                scale_outs.append(hidden.max(axis=2))       # (B, S, C_out)
            feats = concat(scale_outs, axis=-1)
            xyz = cent
        ginp = concat([Tensor(xyz), feats], axis=-1)
        pooled = self.global_mlp(ginp).max(axis=1)          # (B, D)
        return self.head(pooled)

    def logits(self, points: np.ndarray, groups=None) -> Tensor:
        if points.ndim != 2 or points.shape[1] != 3:
            raise ShapeMismatch(f"expected (n, 3) points, got {points.shape}")
        if groups is None:
            groups = self.compute_groups(points)
        return self.logits_batch([points], [groups]).reshape(N_SITES)

    def __call__(self, points: np.ndarray, groups=None) -> Tensor:
        return self.logits(points, groups).sigmoid()

    def classify(self, points: np.ndarray, groups=None) -> SitePrediction:
        probs = self(points, groups).data.copy()
        return SitePrediction(probabilities=probs, threshold=self.cfg.threshold)
