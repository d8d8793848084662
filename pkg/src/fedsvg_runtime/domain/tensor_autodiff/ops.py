"""Differentiable operations over ``Tensor``.

Every op computes its forward value eagerly and, when at least one input is
tracked, appends a record whose adjoint maps the output gradient to one
gradient per input (``None`` for constants).
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy import special

from fedsvg_runtime.domain.tensor_autodiff.tensor import OpRecord, Tape, Tensor

_SQRT_2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _tape_of(*values) -> Optional[Tape]:
    for value in values:
        if isinstance(value, Tensor) and value.tape is not None:
            return value.tape
    return None


def as_tensor(value, tape: Optional[Tape] = None, dtype=None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    if tape is not None:
        dtype = tape.dtype
    return Tensor(np.asarray(value, dtype=dtype), tape, None)


def _emit(kind: str, inputs: Sequence[Tensor], data: np.ndarray, adjoint) -> Tensor:
    tape = _tape_of(*inputs)
    ids = tuple(t.node_id for t in inputs)
    if tape is None or all(node_id is None for node_id in ids):
        return Tensor(data, tape, None)
    out = Tensor(data, tape, tape.new_id())
    tape.record(OpRecord(kind, ids, out.node_id, adjoint))
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _pair(a, b) -> tuple[Tensor, Tensor]:
    tape = _tape_of(a, b)
    dtype = next((v.data.dtype for v in (a, b) if isinstance(v, Tensor)), None)
    return as_tensor(a, tape, dtype), as_tensor(b, tape, dtype)


# -- elementwise arithmetic ---------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _pair(a, b)

    def adjoint(g):
        return (
            _unbroadcast(g, a.shape) if a.tracked else None,
            _unbroadcast(g, b.shape) if b.tracked else None,
        )

    return _emit("add", (a, b), a.data + b.data, adjoint)


def sub(a, b) -> Tensor:
    a, b = _pair(a, b)

    def adjoint(g):
        return (
            _unbroadcast(g, a.shape) if a.tracked else None,
            _unbroadcast(-g, b.shape) if b.tracked else None,
        )

    return _emit("sub", (a, b), a.data - b.data, adjoint)


def mul(a, b) -> Tensor:
    a, b = _pair(a, b)

    def adjoint(g):
        return (
            _unbroadcast(g * b.data, a.shape) if a.tracked else None,
            _unbroadcast(g * a.data, b.shape) if b.tracked else None,
        )

    return _emit("mul", (a, b), a.data * b.data, adjoint)


def div(a, b) -> Tensor:
    a, b = _pair(a, b)

    def adjoint(g):
        return (
            _unbroadcast(g / b.data, a.shape) if a.tracked else None,
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape) if b.tracked else None,
        )

    return _emit("div", (a, b), a.data / b.data, adjoint)


def power(x: Tensor, exponent: float) -> Tensor:
    if exponent == 0:
        return Tensor(np.ones_like(x.data), x.tape, None)

    def adjoint(g):
        return (g * exponent * x.data ** (exponent - 1),)

    return _emit("pow", (x,), x.data**exponent, adjoint)


# -- linear algebra -----------------------------------------------------------


def matmul(a, b) -> Tensor:
    """Batched ``a @ b``; a 2-D right operand is shared across the batch."""
    a, b = _pair(a, b)

    def adjoint(g):
        grad_a = grad_b = None
        if a.tracked:
            grad_a = _unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.shape)
        if b.tracked:
            if b.data.ndim == 2:
                k = a.shape[-1]
                grad_b = a.data.reshape(-1, k).T @ g.reshape(-1, g.shape[-1])
            else:
                grad_b = _unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape)
        return grad_a, grad_b

    return _emit("matmul", (a, b), a.data @ b.data, adjoint)


# -- shape ops ----------------------------------------------------------------


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    return _emit("reshape", (x,), x.data.reshape(shape), lambda g: (g.reshape(x.shape),))


def transpose(x: Tensor, axes: tuple[int, ...]) -> Tensor:
    inverse = tuple(int(i) for i in np.argsort(axes))
    return _emit("transpose", (x,), np.transpose(x.data, axes), lambda g: (np.transpose(g, inverse),))


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tape = _tape_of(*tensors)
    tensors = [as_tensor(t, tape) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def adjoint(g):
        parts = np.split(g, bounds, axis=axis)
        return tuple(part if t.tracked else None for part, t in zip(parts, tensors))

    return _emit("concat", tensors, np.concatenate([t.data for t in tensors], axis=axis), adjoint)


def index(x: Tensor, key) -> Tensor:
    """Basic (slice and integer) indexing."""

    def adjoint(g):
        grad = np.zeros_like(x.data)
        grad[key] = g
        return (grad,)

    return _emit("index", (x,), x.data[key], adjoint)


def gather(x: Tensor, rows: np.ndarray) -> Tensor:
    """Rows of ``x`` selected by an integer array; repeats accumulate on backward."""
    rows = np.asarray(rows, dtype=np.int64)

    def adjoint(g):
        grad = np.zeros_like(x.data)
        np.add.at(grad, rows, g)
        return (grad,)

    return _emit("gather", (x,), x.data[rows], adjoint)


# -- reductions ---------------------------------------------------------------


def sum(x: Tensor, axis: Optional[int | tuple[int, ...]] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    def adjoint(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape),)

    return _emit("sum", (x,), x.data.sum(axis=axis, keepdims=keepdims), adjoint)


def mean(x: Tensor, axis: Optional[int | tuple[int, ...]] = None, keepdims: bool = False) -> Tensor:
    count = x.data.size if axis is None else int(np.prod([x.shape[a] for a in np.atleast_1d(axis)]))
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / max(count, 1))


def segment_sum(x: Tensor, segments: np.ndarray, n_segments: int) -> Tensor:
    """Rows of ``x`` summed into ``n_segments`` buckets."""
    segments = np.asarray(segments, dtype=np.int64)
    out = np.zeros((n_segments,) + x.shape[1:], dtype=x.data.dtype)
    np.add.at(out, segments, x.data)
    return _emit("segment_sum", (x,), out, lambda g: (g[segments],))


# -- normalisation ------------------------------------------------------------


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def adjoint(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return _emit("softmax", (x,), y, adjoint)


def segment_softmax(x: Tensor, segments: np.ndarray, n_segments: int) -> Tensor:
    """Softmax over the rows that share a segment id (edge scores grouped by target)."""
    segments = np.asarray(segments, dtype=np.int64)
    trailing = x.shape[1:]
    peak = np.full((n_segments,) + trailing, -np.inf, dtype=x.data.dtype)
    np.maximum.at(peak, segments, x.data)
    e = np.exp(x.data - peak[segments])
    total = np.zeros((n_segments,) + trailing, dtype=x.data.dtype)
    np.add.at(total, segments, e)
    y = e / total[segments]

    def adjoint(g):
        gy = g * y
        sums = np.zeros((n_segments,) + trailing, dtype=gy.dtype)
        np.add.at(sums, segments, gy)
        return (gy - y * sums[segments],)

    return _emit("segment_softmax", (x,), y, adjoint)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    out = xhat * gamma.data + beta.data

    def adjoint(g):
        grad_x = grad_gamma = grad_beta = None
        if x.tracked:
            gxhat = g * gamma.data
            grad_x = inv * (
                gxhat - gxhat.mean(axis=-1, keepdims=True) - xhat * (gxhat * xhat).mean(axis=-1, keepdims=True)
            )
        if gamma.tracked:
            grad_gamma = _unbroadcast(g * xhat, gamma.shape)
        if beta.tracked:
            grad_beta = _unbroadcast(g, beta.shape)
        return grad_x, grad_gamma, grad_beta

    return _emit("layer_norm", (x, gamma, beta), out, adjoint)


# -- activations --------------------------------------------------------------


def gelu(x: Tensor) -> Tensor:
    """Exact (erf) GELU."""
    cdf = 0.5 * (1.0 + special.erf(x.data / _SQRT_2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x.data * x.data)
    return _emit("gelu", (x,), x.data * cdf, lambda g: (g * (cdf + x.data * pdf),))


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    positive = x.data > 0
    return _emit(
        "leaky_relu",
        (x,),
        np.where(positive, x.data, slope * x.data),
        lambda g: (np.where(positive, g, slope * g),),
    )


def sigmoid(x: Tensor) -> Tensor:
    y = special.expit(x.data)
    return _emit("sigmoid", (x,), y, lambda g: (g * y * (1.0 - y),))


def log_sigmoid(x: Tensor) -> Tensor:
    out = -np.logaddexp(0.0, -x.data).astype(x.data.dtype)
    return _emit("log_sigmoid", (x,), out, lambda g: (g * special.expit(-x.data),))


def log(x: Tensor) -> Tensor:
    return _emit("log", (x,), np.log(x.data), lambda g: (g / x.data,))


def dropout(x: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; identity when not training."""
    if not training or rate <= 0.0:
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.data.dtype) / np.asarray(1.0 - rate, dtype=x.data.dtype)
    return _emit("dropout", (x,), x.data * keep, lambda g: (g * keep,))


def embedding_add(x: Tensor, table: Tensor, ids: np.ndarray) -> Tensor:
    """``x[..., t, :] + table[ids[t]]`` for a token axis second from last."""
    ids = np.asarray(ids, dtype=np.int64)

    def adjoint(g):
        grad_table = None
        if table.tracked:
            per_token = g.reshape((-1,) + g.shape[-2:]).sum(axis=0)
            grad_table = np.zeros_like(table.data)
            np.add.at(grad_table, ids, per_token)
        return (g if x.tracked else None), grad_table

    return _emit("embedding_add", (x, table), x.data + table.data[ids], adjoint)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    out = matmul(x, weight)
    return out if bias is None else add(out, bias)
