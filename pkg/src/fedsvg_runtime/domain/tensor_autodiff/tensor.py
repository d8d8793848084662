"""Dense tensors recorded on a reverse-mode tape.

A ``Tape`` owns the ordered list of op records of one forward pass. Records are
appended as ops execute, which makes the list topologically ordered by
construction; ``backward`` walks it once in reverse. Leaves registered with
``Tape.leaf`` (parameters, or any input whose gradient is wanted) are the only
tensors gradients are reported for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError

Adjoint = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass(frozen=True)
class OpRecord:
    kind: str
    inputs: tuple[Optional[int], ...]
    output: int
    adjoint: Adjoint


class Tape:
    def __init__(self, dtype: np.dtype | type = np.float32) -> None:
        self.dtype = np.dtype(dtype)
        self.records: list[OpRecord] = []
        self.leaves: dict[int, tuple[str, tuple[int, ...]]] = {}
        self._next_id = 0

    def new_id(self) -> int:
        self._next_id += 1
        return self._next_id

    def leaf(self, name: str, value: np.ndarray) -> "Tensor":
        data = np.asarray(value, dtype=self.dtype)
        node_id = self.new_id()
        self.leaves[node_id] = (name, data.shape)
        return Tensor(data, self, node_id)

    def constant(self, value: np.ndarray | float) -> "Tensor":
        return Tensor(np.asarray(value, dtype=self.dtype), self, None)

    def record(self, record: OpRecord) -> None:
        self.records.append(record)


class Tensor:
    """Array plus an optional tape handle; ``node_id`` is None for constants."""

    __slots__ = ("data", "tape", "node_id")

    def __init__(self, data: np.ndarray, tape: Optional[Tape] = None, node_id: Optional[int] = None) -> None:
        self.data = data
        self.tape = tape
        self.node_id = node_id

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def tracked(self) -> bool:
        return self.node_id is not None

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, node_id={self.node_id})"

    def __add__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.add(self, other)

    def __radd__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.add(other, self)

    def __sub__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.sub(other, self)

    def __mul__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.mul(self, other)

    def __rmul__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.mul(other, self)

    def __truediv__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.div(self, other)

    def __matmul__(self, other):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.matmul(self, other)

    def __neg__(self):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.mul(self, -1.0)

    def __getitem__(self, key):
        from fedsvg_runtime.domain.tensor_autodiff import ops

        return ops.index(self, key)


def backward(tape: Tape, loss: Tensor) -> dict[str, np.ndarray]:
    """Gradients of a scalar ``loss`` for every leaf of ``tape``, keyed by leaf name.

    Leaves the loss does not depend on get zero gradients.
    """
    if loss.data.size != 1:
        raise ShapeMismatchError(f"loss must be scalar, got shape {loss.shape}")
    grads: dict[int, np.ndarray] = {}
    if loss.node_id is not None:
        grads[loss.node_id] = np.ones_like(loss.data)
        for record in reversed(tape.records):
            upstream = grads.pop(record.output, None)
            if upstream is None:
                continue
            for node_id, grad in zip(record.inputs, record.adjoint(upstream)):
                if node_id is None or grad is None:
                    continue
                grads[node_id] = grads[node_id] + grad if node_id in grads else grad
    out: dict[str, np.ndarray] = {}
    for node_id, (name, shape) in tape.leaves.items():
        grad = grads.get(node_id)
        out[name] = (
            np.zeros(shape, dtype=tape.dtype) if grad is None else np.asarray(grad, dtype=tape.dtype).reshape(shape)
        )
    return out
