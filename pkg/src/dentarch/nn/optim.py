"""AdamW with decoupled weight decay and a cosine learning-rate schedule."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch
from .tensor import Tensor


def cosine_lr(step: int, base_lr: float, horizon: int) -> float:
    """base_lr * 0.5 * (1 + cos(pi * t / horizon)), clamped at the horizon."""
    t = min(step, horizon)
    return base_lr * 0.5 * (1.0 + np.cos(np.pi * t / horizon))


class AdamW:
    """Decoupled-weight-decay adaptive-moment optimizer.

    Holds first/second moment buffers per parameter, a step counter, the decay
    coefficient, the base learning rate and the cosine horizon.
    """

    def __init__(self, params: dict[str, Tensor], base_lr: float = 1e-4,
                 horizon: int = 1000, weight_decay: float = 0.01,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = dict(params)
        self.base_lr = base_lr
        self.horizon = horizon
        self.weight_decay = weight_decay
        self.betas = betas
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(p.data) for k, p in self.params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in self.params.items()}

    @property
    def lr(self) -> float:
        return cosine_lr(self.step_count, self.base_lr, self.horizon)

    def step(self) -> float:
        """Apply one update from accumulated gradients; returns the lr used."""
        lr = self.lr
        b1, b2 = self.betas
        t = self.step_count + 1
        for key, p in self.params.items():
            grad = p.grad if p.grad is not None else np.zeros_like(p.data)
            if grad.shape != p.data.shape:
                raise ShapeMismatch(f"gradient shape for {key}")
            m = self.m[key]
            v = self.v[key]
            m *= b1
            m += (1.0 - b1) * grad
            v *= b2
            v += (1.0 - b2) * grad * grad
            mhat = m / (1.0 - b1 ** t)
            vhat = v / (1.0 - b2 ** t)
            p.data -= lr * self.weight_decay * p.data
            p.data -= lr * mhat / (np.sqrt(vhat) + self.eps)
        self.step_count = t
        return lr

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()
