"""Dense tensors with reverse-mode automatic differentiation.

A Tensor wraps a float64 ndarray and remembers how it was produced. Calling
``backward()`` on a scalar walks the tape in reverse topological order and
accumulates exact analytic gradients into every reachable tensor that has
``requires_grad`` set.

The op set is deliberately small: matmul, elementwise arithmetic, concat,
slicing, reductions, softmax, layer_norm, gelu, sigmoid and row gathering
(embedding lookup). Broadcasting follows numpy; gradients of broadcast
operands are summed back to the operand shape.

Training loops run orders of magnitude more allocations than computations at
desk scale, and fresh multi-megabyte buffers are the dominant cost on a small
box (mmap page faults). ``step_arena()`` makes ops draw their output buffers
from a shape-keyed pool that is recycled when the scope exits: wrap exactly
one forward/backward/update cycle per scope and do not hold references to
tensors created inside a scope after it closes. Outside a scope every op
allocates normally and tensors are immutable value semantics as usual.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np
from scipy.special import erf

from ..errors import NonFiniteValue, ShapeMismatch

_CHECKED = False

_SQRT2 = float(np.sqrt(2.0))
_INV_SQRT_2PI = float(1.0 / np.sqrt(2.0 * np.pi))


def set_checked_mode(on: bool) -> None:
    """Enable NaN/Inf rejection at op boundaries (slower; for debugging)."""
    global _CHECKED
    _CHECKED = bool(on)


class _Arena:
    __slots__ = ("free", "live", "active")

    def __init__(self):
        self.free: dict[tuple, list] = {}
        self.live: list = []
        self.active = False

    def empty(self, shape) -> np.ndarray:
        shape = tuple(shape)
        if not self.active:
            return np.empty(shape)
        stack = self.free.get(shape)
        arr = stack.pop() if stack else np.empty(shape)
        self.live.append(arr)
        return arr

    def recycle(self) -> None:
        for arr in self.live:
            self.free.setdefault(arr.shape, []).append(arr)
        self.live.clear()


_ARENA = _Arena()


def _empty(shape) -> np.ndarray:
    return _ARENA.empty(shape)


@contextmanager
def step_arena():
    """Pool tensor buffers for one training step; see module docstring."""
    outer = _ARENA.active
    _ARENA.active = True
    try:
        yield
    finally:
        _ARENA.active = outer
        if not outer:
            _ARENA.recycle()


def _check_finite(arr: np.ndarray) -> None:
    if _CHECKED and not np.all(np.isfinite(arr)):
        raise NonFiniteValue("non-finite value at op boundary")


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient over the axes numpy broadcasting introduced."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents: tuple = ()
        self._backward = None

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def _from_op(data: np.ndarray, parents, backward) -> "Tensor":
        _check_finite(data)
        out = Tensor.__new__(Tensor)
        out.data = data if isinstance(data, np.ndarray) else np.asarray(
            data, dtype=np.float64)
        out.grad = None
        out.requires_grad = False
        out._parents = ()
        out._backward = None
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, grad={self.requires_grad})"

    # -- autodiff driver -------------------------------------------------------

    def backward(self, seed=None) -> None:
        """Accumulate gradients of self (a scalar unless seed given) on the tape."""
        if seed is None:
            if self.data.size != 1:
                raise ShapeMismatch("backward() without seed needs a scalar")
            seed = np.ones_like(self.data)
        topo: list[Tensor] = []
        refs: dict[int, int] = {}
        visited = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if not p.requires_grad:
                    continue
                refs[id(p)] = refs.get(id(p), 0) + 1
                if id(p) not in visited:
                    stack.append((p, False))
        self.grad = np.asarray(seed, dtype=np.float64).reshape(self.shape) + (
            self.grad if self.grad is not None else 0.0
        )
        for node in reversed(topo):
            if node._backward is None or node.grad is None:
                continue
            g = node.grad
            for parent, pgrad in node._backward(g):
                if not parent.requires_grad:
                    continue
                if parent.grad is None:
                    # sole consumer: adopt fresh arrays, copy views/aliases
                    if refs.get(id(parent), 0) <= 1 and pgrad.base is None \
                            and pgrad is not g:
                        parent.grad = pgrad
                    else:
                        buf = _empty(pgrad.shape)
                        np.copyto(buf, pgrad)
                        parent.grad = buf
                else:
                    parent.grad += pgrad

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        shape = np.broadcast_shapes(self.data.shape, other.data.shape)
        data = np.add(self.data, other.data, out=_empty(shape))

        def bw(g):
            return (
                (self, _unbroadcast(g, self.data.shape)),
                (other, _unbroadcast(g, other.data.shape)),
            )

        return Tensor._from_op(data, (self, other), bw)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_tensor(other)
        shape = np.broadcast_shapes(self.data.shape, other.data.shape)
        data = np.subtract(self.data, other.data, out=_empty(shape))

        def bw(g):
            return (
                (self, _unbroadcast(g, self.data.shape)),
                (other, _unbroadcast(np.negative(g, out=_empty(g.shape)),
                                     other.data.shape)),
            )

        return Tensor._from_op(data, (self, other), bw)

    def __rsub__(self, other):
        return as_tensor(other).__sub__(self)

    def __neg__(self):
        def bw(g):
            return ((self, np.negative(g, out=_empty(g.shape))),)

        return Tensor._from_op(np.negative(self.data, out=_empty(self.shape)),
                               (self,), bw)

    def __mul__(self, other):
        other = as_tensor(other)
        shape = np.broadcast_shapes(self.data.shape, other.data.shape)
        data = np.multiply(self.data, other.data, out=_empty(shape))
        a, b = self, other

        def bw(g):
            ga = np.multiply(g, b.data, out=_empty(
                np.broadcast_shapes(g.shape, b.data.shape)))
            gb = np.multiply(g, a.data, out=_empty(
                np.broadcast_shapes(g.shape, a.data.shape)))
            return (
                (a, _unbroadcast(ga, a.data.shape)),
                (b, _unbroadcast(gb, b.data.shape)),
            )

        return Tensor._from_op(data, (self, other), bw)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        shape = np.broadcast_shapes(self.data.shape, other.data.shape)
        data = np.divide(self.data, other.data, out=_empty(shape))
        a, b = self, other

        def bw(g):
            ga = np.divide(g, b.data, out=_empty(
                np.broadcast_shapes(g.shape, b.data.shape)))
            gb = np.multiply(g, data, out=_empty(
                np.broadcast_shapes(g.shape, data.shape)))
            np.divide(gb, b.data, out=gb)
            np.negative(gb, out=gb)
            return (
                (a, _unbroadcast(ga, a.data.shape)),
                (b, _unbroadcast(gb, b.data.shape)),
            )

        return Tensor._from_op(data, (self, other), bw)

    def __matmul__(self, other):
        other = as_tensor(other)
        a, b = self, other
        if a.ndim >= 2 and b.ndim >= 2:
            if a.data.shape[-1] != b.data.shape[-2]:
                raise ShapeMismatch(f"matmul {a.shape} @ {b.shape}")
            shape = np.broadcast_shapes(a.data.shape[:-2], b.data.shape[:-2]) \
                + (a.data.shape[-2], b.data.shape[-1])
            data = np.matmul(a.data, b.data, out=_empty(shape))

            def bw(g):
                bt = np.swapaxes(b.data, -1, -2)
                ga_shape = np.broadcast_shapes(g.shape[:-2], bt.shape[:-2]) \
                    + (g.shape[-2], bt.shape[-1])
                ga = np.matmul(g, bt, out=_empty(ga_shape))
                at = np.swapaxes(a.data, -1, -2)
                gb_shape = np.broadcast_shapes(at.shape[:-2], g.shape[:-2]) \
                    + (at.shape[-2], g.shape[-1])
                gb = np.matmul(at, g, out=_empty(gb_shape))
                return (
                    (a, _unbroadcast(ga, a.data.shape)),
                    (b, _unbroadcast(gb, b.data.shape)),
                )

            return Tensor._from_op(data, (a, b), bw)

        # vector cases are small; plain allocations
        if a.data.shape[-1] != b.data.shape[-2 if b.ndim > 1 else 0]:
            raise ShapeMismatch(f"matmul {a.shape} @ {b.shape}")
        data = a.data @ b.data

        def bw_vec(g):
            if b.ndim == 1:
                ga = np.multiply.outer(g, b.data)
                gb = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1)
                return ((a, _unbroadcast(ga.reshape(a.data.shape), a.data.shape)),
                        (b, gb))
            ga_full = (b.data @ g[..., :, None])[..., 0]
            ga = ga_full.reshape(-1, a.shape[0]).sum(axis=0)
            gb = np.multiply.outer(a.data, g) if b.ndim == 2 else (
                a.data[:, None] * g[..., None, :])
            return ((a, ga), (b, _unbroadcast(gb, b.data.shape)))

        return Tensor._from_op(data, (a, b), bw_vec)

    def square(self):
        data = np.multiply(self.data, self.data, out=_empty(self.shape))

        def bw(g):
            out = np.multiply(g, self.data, out=_empty(g.shape))
            out *= 2.0
            return ((self, out),)

        return Tensor._from_op(data, (self,), bw)

    def sqrt(self):
        data = np.sqrt(self.data, out=_empty(self.shape))

        def bw(g):
            denom = np.maximum(data, 1e-300)
            out = np.divide(g, denom, out=_empty(g.shape))
            out *= 0.5
            return ((self, out),)

        return Tensor._from_op(data, (self,), bw)

    def exp(self):
        data = np.exp(self.data, out=_empty(self.shape))

        def bw(g):
            return ((self, np.multiply(g, data, out=_empty(g.shape))),)

        return Tensor._from_op(data, (self,), bw)

    def log(self):
        data = np.log(self.data, out=_empty(self.shape))

        def bw(g):
            return ((self, np.divide(g, self.data, out=_empty(g.shape))),)

        return Tensor._from_op(data, (self,), bw)

    # -- shape ops ---------------------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.data.shape

        def bw(g):
            return ((self, g.reshape(old)),)

        return Tensor._from_op(self.data.reshape(shape), (self,), bw)

    def transpose(self, axes):
        inv = tuple(np.argsort(axes))

        def bw(g):
            return ((self, g.transpose(inv)),)

        return Tensor._from_op(self.data.transpose(axes), (self,), bw)

    def __getitem__(self, idx):
        data = self.data[idx]
        src = self

        def bw(g):
            full = _empty(src.data.shape)
            full.fill(0.0)
            np.add.at(full, idx, g)
            return ((src, full),)

        return Tensor._from_op(data, (self,), bw)

    # -- reductions ----------------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        data = self.data.sum(axis=axis, keepdims=keepdims)
        src = self

        def bw(g):
            out = _empty(src.data.shape)
            if axis is None:
                np.copyto(out, g)
            else:
                np.copyto(out, g if keepdims else np.expand_dims(g, axis))
            return ((src, out),)

        return Tensor._from_op(data, (self,), bw)

    def mean(self, axis=None, keepdims: bool = False):
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def max(self, axis: int):
        """Max over one axis; gradient routes to the first argmax position."""
        data = self.data.max(axis=axis)
        idx = self.data.argmax(axis=axis)
        src = self

        def bw(g):
            full = _empty(src.data.shape)
            full.fill(0.0)
            grid = np.indices(idx.shape)
            sel = list(grid)
            sel.insert(axis if axis >= 0 else src.ndim + axis, idx)
            np.add.at(full, tuple(sel), g)
            return ((src, full),)

        return Tensor._from_op(data, (self,), bw)

    # -- nonlinearities ---------------------------------------------------------------

    def sigmoid(self):
        x = self.data
        data = _empty(x.shape)
        # exp(-x) overflows to inf for x << 0, giving the correct limit 0
        with np.errstate(over="ignore"):
            np.multiply(x, -1.0, out=data)
            np.exp(data, out=data)
            np.add(data, 1.0, out=data)
            np.reciprocal(data, out=data)

        def bw(g):
            out = np.subtract(1.0, data, out=_empty(data.shape))
            out *= data
            out *= g
            return ((self, out),)

        return Tensor._from_op(data, (self,), bw)

    def gelu(self):
        x = self.data
        phi = np.multiply(x, 1.0 / _SQRT2, out=_empty(x.shape))
        erf(phi, out=phi)
        phi += 1.0
        phi *= 0.5
        data = np.multiply(x, phi, out=_empty(x.shape))

        def bw(g):
            pdf = np.multiply(x, x, out=_empty(x.shape))
            pdf *= -0.5
            np.exp(pdf, out=pdf)
            pdf *= _INV_SQRT_2PI
            pdf *= x
            pdf += phi
            pdf *= g
            return ((self, pdf),)

        return Tensor._from_op(data, (self,), bw)

    def softmax(self, axis: int = -1):
        m = self.data.max(axis=axis, keepdims=True)
        data = np.subtract(self.data, m, out=_empty(self.shape))
        np.exp(data, out=data)
        data /= data.sum(axis=axis, keepdims=True)

        def bw(g):
            tmp = np.multiply(g, data, out=_empty(g.shape))
            dot = tmp.sum(axis=axis, keepdims=True)
            out = np.subtract(g, dot, out=tmp)
            out *= data
            return ((self, out),)

        return Tensor._from_op(data, (self,), bw)

    def layer_norm(self, gain: "Tensor", bias: "Tensor", eps: float = 1e-5):
        """Normalize the last axis, then scale and shift."""
        x = self.data
        mu = x.mean(axis=-1, keepdims=True)
        xhat = np.subtract(x, mu, out=_empty(x.shape))
        var = np.multiply(xhat, xhat, out=_empty(x.shape)).mean(
            axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + eps)
        xhat *= inv
        data = np.multiply(xhat, gain.data, out=_empty(x.shape))
        data += bias.data
        src = self

        def bw(g):
            dxhat = np.multiply(g, gain.data, out=_empty(g.shape))
            mean1 = dxhat.mean(axis=-1, keepdims=True)
            mean2 = np.multiply(dxhat, xhat, out=_empty(g.shape)).mean(
                axis=-1, keepdims=True)
            gx = dxhat
            tmp = np.multiply(xhat, mean2, out=_empty(g.shape))
            gx -= mean1
            gx -= tmp
            gx *= inv
            red = tuple(range(g.ndim - 1))
            ggain = np.multiply(g, xhat, out=_empty(g.shape)).sum(axis=red)
            return (
                (src, gx),
                (gain, ggain),
                (bias, g.sum(axis=red)),
            )

        return Tensor._from_op(data, (self, gain, bias), bw)

    def rownorm(self, eps: float = 1e-12):
        """Euclidean norm over the last axis, safe gradient near zero."""
        sq = np.multiply(self.data, self.data, out=_empty(self.shape))
        data = np.sqrt(sq.sum(axis=-1))
        src = self

        def bw(g):
            denom = np.maximum(data, eps)
            coef = np.divide(g, denom, out=_empty(g.shape))
            out = np.multiply(src.data, coef[..., None],
                              out=_empty(src.data.shape))
            return ((src, out),)

        return Tensor._from_op(data, (self,), bw)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    shapes = [t.data.shape for t in tensors]
    out_shape = list(shapes[0])
    out_shape[axis] = sum(s[axis] for s in shapes)
    data = np.concatenate([t.data for t in tensors], axis=axis,
                          out=_empty(tuple(out_shape)))
    sizes = [s[axis] for s in shapes]
    splits = np.cumsum(sizes)[:-1]

    def bw(g):
        pieces = np.split(g, splits, axis=axis)
        return tuple(zip(tensors, pieces))

    return Tensor._from_op(data, tensors, bw)


def gather_rows(table: Tensor, indices) -> Tensor:
    """table[indices] along axis 0; scatter-add gradient (embedding lookup)."""
    idx = np.asarray(indices, dtype=np.intp)
    data = table.data[idx]

    def bw(g):
        full = np.zeros_like(table.data)
        np.add.at(full, idx, g)
        return ((table, full),)

    return Tensor._from_op(data, (table,), bw)
