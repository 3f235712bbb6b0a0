"""Learnable building blocks on top of the tensor tape.

Initialization policy: linear weights are drawn from normal(0, 2/(fan_in +
fan_out)) (variance given), biases start at zero, embedding tables from
normal(0, 0.02). Attention blocks are pre-norm residual; head count defaults
to dim/16.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, concat, gather_rows


class Module:
    """Base class: parameter discovery by attribute walk, stable names."""

    def params(self, prefix: str = "") -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            key = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                out[key] = value
            elif isinstance(value, Module):
                out.update(value.params(f"{key}."))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        out.update(item.params(f"{key}.{i}."))
        return out

    def zero_grad(self) -> None:
        for p in self.params().values():
            p.zero_grad()


def _init_linear(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    std = np.sqrt(2.0 / (fan_in + fan_out))
    return rng.normal(0.0, std, size=(fan_in, fan_out))


class Linear(Module):
    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator):
        self.weight = Tensor(_init_linear(rng, fan_in, fan_out), requires_grad=True)
        self.bias = Tensor(np.zeros(fan_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        self.gain = Tensor(np.ones(dim), requires_grad=True)
        self.bias = Tensor(np.zeros(dim), requires_grad=True)
        self._eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return x.layer_norm(self.gain, self.bias, self._eps)


class Mlp(Module):
    """Stack of Linear layers with GELU between (none after the last)."""

    def __init__(self, widths: tuple[int, ...], rng: np.random.Generator):
        self.layers = [Linear(a, b, rng) for a, b in zip(widths[:-1], widths[1:])]

    def __call__(self, x: Tensor) -> Tensor:
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1:
                x = x.gelu()
        return x


class Embedding(Module):
    def __init__(self, count: int, dim: int, rng: np.random.Generator):
        self.table = Tensor(rng.normal(0.0, 0.02, size=(count, dim)), requires_grad=True)

    def __call__(self, indices) -> Tensor:
        return gather_rows(self.table, indices)


class MultiHeadSelfAttention(Module):
    def __init__(self, dim: int, heads: int, rng: np.random.Generator):
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.wq = Linear(dim, dim, rng)
        self.wk = Linear(dim, dim, rng)
        self.wv = Linear(dim, dim, rng)
        self.wo = Linear(dim, dim, rng)
        self._heads = heads
        self._scale = 1.0 / np.sqrt(dim // heads)

    def __call__(self, x: Tensor) -> Tensor:
        """x: (n, d) or batched (b, n, d)."""
        *lead, n, d = x.shape
        h = self._heads
        dh = d // h
        if lead:
            fwd = tuple(range(len(lead))) + (len(lead) + 1, len(lead), len(lead) + 2)
        else:
            fwd = (1, 0, 2)

        def split(t: Tensor) -> Tensor:
            return t.reshape(*lead, n, h, dh).transpose(fwd)  # (..., h, n, dh)

        q, k, v = split(self.wq(x)), split(self.wk(x)), split(self.wv(x))
        kt = tuple(range(k.ndim - 2)) + (k.ndim - 1, k.ndim - 2)
        scores = (q @ k.transpose(kt)) * self._scale  # (..., h, n, n)
        att = scores.softmax(axis=-1)
        mixed = att @ v  # (..., h, n, dh)
        merged = mixed.transpose(fwd).reshape(*lead, n, d)
        return self.wo(merged)


class TransformerBlock(Module):
    """Pre-norm residual block: attention then feed-forward."""

    def __init__(self, dim: int, rng: np.random.Generator, heads: int | None = None,
                 mlp_ratio: int = 4):
        heads = heads or max(1, dim // 16)
        self.norm1 = LayerNorm(dim)
        self.attn = MultiHeadSelfAttention(dim, heads, rng)
        self.norm2 = LayerNorm(dim)
        self.ff = Mlp((dim, mlp_ratio * dim, dim), rng)

    def __call__(self, x: Tensor) -> Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.ff(self.norm2(x))
