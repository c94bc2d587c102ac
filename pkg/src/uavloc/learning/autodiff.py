"""A small reverse-mode autodiff over numpy arrays.

Every operation returns a new :class:`Tensor` that remembers its parents and
a closure accumulating gradients into them. :meth:`Tensor.backward` walks the
graph in reverse topological order.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=float)
        self.grad = np.zeros_like(self.data) if requires_grad else None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def _accumulate(self, g: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self, grad=None) -> None:
        order, seen = [], set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            order.append(t)

        visit(self)
        self._accumulate(np.ones_like(self.data) if grad is None else np.asarray(grad, dtype=float))
        for t in reversed(order):
            if t._backward is not None and t.grad is not None:
                t._backward(t.grad)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = as_tensor(other)

        def back(g):
            self._accumulate(_unbroadcast(g, self.shape))
            other._accumulate(_unbroadcast(g, other.shape))

        return _node(self.data + other.data, (self, other), back)

    __radd__ = __add__

    def __neg__(self):
        return _node(-self.data, (self,), lambda g: self._accumulate(-g))

    def __sub__(self, other):
        return self + (-as_tensor(other))

    def __rsub__(self, other):
        return as_tensor(other) + (-self)

    def __mul__(self, other):
        other = as_tensor(other)

        def back(g):
            self._accumulate(_unbroadcast(g * other.data, self.shape))
            other._accumulate(_unbroadcast(g * self.data, other.shape))

        return _node(self.data * other.data, (self, other), back)

    __rmul__ = __mul__

    def __matmul__(self, other):
        other = as_tensor(other)

        def back(g):
            self._accumulate(g @ other.data.T)
            other._accumulate(self.data.T @ g)

        return _node(self.data @ other.data, (self, other), back)

    def __getitem__(self, idx):
        parts = idx if isinstance(idx, tuple) else (idx,)
        basic = all(isinstance(i, (slice, int, type(None), type(Ellipsis))) for i in parts)

        def back(g):
            full = np.zeros_like(self.data)
            if basic:
                full[idx] += g
            else:
                np.add.at(full, idx, g)
            self._accumulate(full)

        return _node(self.data[idx], (self,), back)

    def reshape(self, *shape):
        return _node(self.data.reshape(*shape), (self,), lambda g: self._accumulate(g.reshape(self.shape)))

    def sum(self):
        return _node(self.data.sum(), (self,), lambda g: self._accumulate(np.broadcast_to(g, self.shape).copy()))

    def mean(self):
        n = self.data.size
        return _node(self.data.mean(), (self,),
                     lambda g: self._accumulate(np.broadcast_to(g / n, self.shape).copy()))


def _node(data, parents, backward) -> Tensor:
    needs = any(p.requires_grad or p._backward is not None for p in parents)
    out = Tensor(data, requires_grad=needs, _parents=parents if needs else (), _backward=backward if needs else None)
    return out


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def parameter(data) -> Tensor:
    return Tensor(np.array(data, dtype=float), requires_grad=True)


# elementwise nonlinearities ---------------------------------------------

def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return _node(x.data * mask, (x,), lambda g: x._accumulate(g * mask))


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    return _node(y, (x,), lambda g: x._accumulate(g * (1.0 - y * y)))


def sigmoid(x: Tensor) -> Tensor:
    y = 0.5 * (1.0 + np.tanh(0.5 * x.data))
    return _node(y, (x,), lambda g: x._accumulate(g * y * (1.0 - y)))


# structural -------------------------------------------------------------

def concat(tensors: list[Tensor], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def back(g):
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(lo, hi)
            t._accumulate(g[tuple(sl)])

    return _node(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), back)


def stack(tensors: list[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]

    def back(g):
        for i, t in enumerate(tensors):
            t._accumulate(np.take(g, i, axis=axis))

    return _node(np.stack([t.data for t in tensors], axis=axis), tuple(tensors), back)


# convolution and pooling ------------------------------------------------

def conv2d(x: Tensor, w: Tensor, b: Tensor | None = None, padding: int = 0) -> Tensor:
    """Stride-1 cross-correlation. ``x`` is (B, C, H, W), ``w`` is (F, C, kh, kw)."""
    f, c, kh, kw = w.shape
    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x.data
    cols = sliding_window_view(xp, (kh, kw), axis=(2, 3))  # (B, C, Ho, Wo, kh, kw)
    out = np.einsum("bchwij,fcij->bfhw", cols, w.data, optimize=True)
    if b is not None:
        out = out + b.data[None, :, None, None]
    ho, wo = out.shape[2], out.shape[3]

    def back(g):
        if w.requires_grad:
            w._accumulate(np.einsum("bfhw,bchwij->fcij", g, cols, optimize=True))
        if b is not None and b.requires_grad:
            b._accumulate(g.sum(axis=(0, 2, 3)))
        if x.requires_grad or x._backward is not None:
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    gxp[:, :, i:i + ho, j:j + wo] += np.einsum("bfhw,fc->bchw", g, w.data[:, :, i, j], optimize=True)
            if padding:
                gxp = gxp[:, :, padding:-padding, padding:-padding]
            x._accumulate(gxp)

    parents = (x, w) if b is None else (x, w, b)
    return _node(out, parents, back)


def maxpool2d(x: Tensor, size: int = 2) -> Tensor:
    """Non-overlapping max pooling; trailing rows/columns that do not fill a window are dropped."""
    bsz, c, h, wd = x.shape
    ho, wo = h // size, wd // size
    cropped = x.data[:, :, :ho * size, :wo * size]
    windows = cropped.reshape(bsz, c, ho, size, wo, size).transpose(0, 1, 2, 4, 3, 5).reshape(bsz, c, ho, wo, size * size)
    arg = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]

    def back(g):
        gw = np.zeros_like(windows)
        np.put_along_axis(gw, arg[..., None], g[..., None], axis=-1)
        gx = np.zeros_like(x.data)
        gx[:, :, :ho * size, :wo * size] = (gw.reshape(bsz, c, ho, wo, size, size)
                                            .transpose(0, 1, 2, 4, 3, 5).reshape(bsz, c, ho * size, wo * size))
        x._accumulate(gx)

    return _node(out, (x,), back)


def mse_loss(pred: Tensor, target) -> Tensor:
    diff = pred - as_tensor(target)
    return (diff * diff).mean()
