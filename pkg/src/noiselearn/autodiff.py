"""Minimal reverse-mode automatic differentiation over numpy arrays.

Covers exactly what the sequence model and its objectives need: affine
maps, tanh, pooling, row normalization, masked log-sum-exp reductions,
and elementwise arithmetic. Each operation records a backward closure;
`Tensor.backward()` walks the graph in reverse topological order and
accumulates gradients into leaves created with ``requires_grad=True``.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError
from .numerics import NORM_FLOOR

# Fill value for entries excluded from a log-sum-exp; large enough to
# underflow to exactly zero after exponentiation, finite so gradients
# stay well defined.
NEG_FILL = -1e30


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar output")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def parameter(data) -> Tensor:
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)


def constant(data) -> Tensor:
    return Tensor(data)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accumulate(t: Tensor, g: np.ndarray):
    if not t.requires_grad:
        return
    t.grad = g if t.grad is None else t.grad + g


def _child(data, parents, backward) -> Tensor:
    requires = any(p.requires_grad for p in parents)
    return Tensor(data, requires_grad=requires, parents=parents,
                  backward=backward if requires else None)


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to `shape`, inverting numpy broadcasting."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, s in enumerate(shape):
        if s == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data + b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(g, b.data.shape))

    return _child(out_data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data - b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(-g, b.data.shape))

    return _child(out_data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data * b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.data, a.data.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.data.shape))

    return _child(out_data, (a, b), backward)


def scale(a: Tensor, s: float) -> Tensor:
    out_data = a.data * s

    def backward(g):
        _accumulate(a, g * s)

    return _child(out_data, (a,), backward)


def neg(a: Tensor) -> Tensor:
    return scale(a, -1.0)


def matmul(a, b) -> Tensor:
    """Matrix product; `a` may be 2-D or 3-D (leading batch axis), `b` 2-D."""
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data @ b.data

    def backward(g):
        _accumulate(a, _unbroadcast(g @ b.data.swapaxes(-1, -2), a.data.shape))
        _accumulate(b, _unbroadcast(a.data.swapaxes(-1, -2) @ g, b.data.shape))

    return _child(out_data, (a, b), backward)


def transpose(a: Tensor) -> Tensor:
    out_data = a.data.T

    def backward(g):
        _accumulate(a, g.T)

    return _child(out_data, (a,), backward)


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)

    def backward(g):
        _accumulate(a, g * (1.0 - out_data * out_data))

    return _child(out_data, (a,), backward)


def mean(a: Tensor, axis: int) -> Tensor:
    out_data = a.data.mean(axis=axis)
    count = a.data.shape[axis]

    def backward(g):
        _accumulate(a, np.broadcast_to(np.expand_dims(g, axis), a.data.shape) / count)

    return _child(out_data, (a,), backward)


def reduce_sum(a: Tensor, axis=None) -> Tensor:
    out_data = a.data.sum(axis=axis)

    def backward(g):
        if axis is None:
            _accumulate(a, np.broadcast_to(g, a.data.shape).copy())
        else:
            _accumulate(a, np.broadcast_to(np.expand_dims(g, axis), a.data.shape).copy())

    return _child(out_data, (a,), backward)


def exp(a: Tensor) -> Tensor:
    out_data = np.exp(a.data)

    def backward(g):
        _accumulate(a, g * out_data)

    return _child(out_data, (a,), backward)


def normalize_rows(a: Tensor) -> Tensor:
    """Scale each row of a 2-D tensor to unit Euclidean norm."""
    norms = np.linalg.norm(a.data, axis=1, keepdims=True)
    if np.any(norms <= NORM_FLOOR):
        raise DegenerateInputError("cannot normalize a row with near-zero norm")
    out_data = a.data / norms

    def backward(g):
        # d(x/|x|)/dx applied rowwise: (g - y * <y, g>) / |x|
        dots = (out_data * g).sum(axis=1, keepdims=True)
        _accumulate(a, (g - out_data * dots) / norms)

    return _child(out_data, (a,), backward)


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    z = a.data - a.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=axis, keepdims=True))
    out_data = z - lse

    def backward(g):
        soft = np.exp(out_data)
        _accumulate(a, g - soft * g.sum(axis=axis, keepdims=True))

    return _child(out_data, (a,), backward)


def logsumexp(a: Tensor, axis: int = -1) -> Tensor:
    m = a.data.max(axis=axis, keepdims=True)
    e = np.exp(a.data - m)
    s = e.sum(axis=axis, keepdims=True)
    out_data = (np.log(s) + m).squeeze(axis)

    def backward(g):
        _accumulate(a, np.expand_dims(g, axis) * (e / s))

    return _child(out_data, (a,), backward)


def masked_fill(a: Tensor, mask: np.ndarray, value: float) -> Tensor:
    """Replace entries where `mask` is True by a constant (no grad through them)."""
    out_data = np.where(mask, value, a.data)

    def backward(g):
        _accumulate(a, np.where(mask, 0.0, g))

    return _child(out_data, (a,), backward)


def take_rows(a: Tensor, idx: np.ndarray) -> Tensor:
    idx = np.asarray(idx)
    out_data = a.data[idx]

    def backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        _accumulate(a, full)

    return _child(out_data, (a,), backward)


def take_per_row(a: Tensor, idx: np.ndarray) -> Tensor:
    """out[i] = a[i, idx[i]] for a 2-D tensor."""
    idx = np.asarray(idx)
    rows = np.arange(a.data.shape[0])
    out_data = a.data[rows, idx]

    def backward(g):
        full = np.zeros_like(a.data)
        full[rows, idx] = g
        _accumulate(a, full)

    return _child(out_data, (a,), backward)


def diag_part(a: Tensor) -> Tensor:
    n = a.data.shape[0]
    rows = np.arange(n)
    out_data = a.data[rows, rows]

    def backward(g):
        full = np.zeros_like(a.data)
        full[rows, rows] = g
        _accumulate(a, full)

    return _child(out_data, (a,), backward)
