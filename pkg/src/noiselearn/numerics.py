"""Dense numeric primitives every other module builds on.

All arithmetic is float64; file formats downcast to float32 at the I/O
boundary only.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DegenerateInputError

NORM_FLOOR = 1e-12


def softmax(logits: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Temperature-scaled softmax over the last axis, with max-subtraction.

    Raises ValueError on non-finite input or non-positive temperature.
    """
    z = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("softmax input must be finite")
    if not temperature > 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    z = z / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def l2_normalize(x: np.ndarray) -> np.ndarray:
    """Scale a vector to unit Euclidean norm."""
    x = np.asarray(x, dtype=np.float64)
    norm = float(np.linalg.norm(x))
    if norm <= NORM_FLOOR:
        raise DegenerateInputError(f"cannot normalize vector with norm {norm:.3e}")
    return x / norm


def check_simplex(p: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Validate that rows of `p` are probability vectors; returns float64 copy."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < -tol):
        raise ValueError("probability entries must be non-negative")
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise ValueError("probability entries must sum to 1")
    return p


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    out = np.zeros((labels.size, n_classes), dtype=np.float64)
    out[np.arange(labels.size), labels.ravel()] = 1.0
    return out.reshape(labels.shape + (n_classes,))


def finite_diff_grad(loss_fn: Callable, params, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar loss w.r.t. one parameter tensor.

    `params` is any object with a mutable float64 `.data` array (a leaf
    tensor); `loss_fn(params)` must return a scalar and be deterministic.
    This is the gradient oracle the whole test suite checks backprop
    against, so it must never share code with the reverse-mode tape.
    """
    values = params.data
    grad = np.zeros_like(values)
    flat_v = values.reshape(-1)
    flat_g = grad.reshape(-1)
    for idx in range(flat_v.size):
        orig = flat_v[idx]
        flat_v[idx] = orig + h
        up = float(loss_fn(params))
        flat_v[idx] = orig - h
        down = float(loss_fn(params))
        flat_v[idx] = orig
        flat_g[idx] = (up - down) / (2.0 * h)
    return grad
