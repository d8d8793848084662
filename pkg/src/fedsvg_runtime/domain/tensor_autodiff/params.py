"""Named parameter collections in declaration order."""

from __future__ import annotations

from typing import Iterator, Mapping

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tape, Tensor


class ParamStore(Mapping[str, np.ndarray]):
    """Ordered ``name -> array`` map.

    Arrays are stored read-only so a store can be shared between client threads
    as a snapshot; every update produces a new store.
    """

    def __init__(self, values: Mapping[str, np.ndarray] | None = None, dtype=np.float32) -> None:
        self.dtype = np.dtype(dtype)
        self._values: dict[str, np.ndarray] = {}
        for name, value in (values or {}).items():
            array = np.array(value, dtype=self.dtype, copy=True)
            array.setflags(write=False)
            self._values[name] = array

    def __getitem__(self, name: str) -> np.ndarray:
        return self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    @property
    def names(self) -> list[str]:
        return list(self._values)

    @property
    def shapes(self) -> dict[str, tuple[int, ...]]:
        return {name: value.shape for name, value in self._values.items()}

    @property
    def size(self) -> int:
        return int(sum(value.size for value in self._values.values()))

    def flatten(self) -> np.ndarray:
        if not self._values:
            return np.zeros(0, dtype=self.dtype)
        return np.concatenate([value.ravel() for value in self._values.values()])

    def unflatten(self, vector: np.ndarray) -> "ParamStore":
        vector = np.asarray(vector)
        if vector.shape != (self.size,):
            raise ShapeMismatchError(f"flat vector has shape {vector.shape}, expected ({self.size},)")
        out: dict[str, np.ndarray] = {}
        offset = 0
        for name, value in self._values.items():
            out[name] = vector[offset : offset + value.size].reshape(value.shape)
            offset += value.size
        return ParamStore(out, dtype=self.dtype)

    def replace(self, updates: Mapping[str, np.ndarray]) -> "ParamStore":
        merged = dict(self._values)
        for name, value in updates.items():
            if name not in merged:
                raise ShapeMismatchError(f"unknown parameter {name!r}")
            if np.shape(value) != merged[name].shape:
                raise ShapeMismatchError(f"{name}: shape {np.shape(value)} != {merged[name].shape}")
            merged[name] = value
        return ParamStore(merged, dtype=self.dtype)

    def astype(self, dtype) -> "ParamStore":
        return ParamStore(self._values, dtype=dtype)

    def check_compatible(self, other: Mapping[str, np.ndarray]) -> None:
        if list(other) != self.names:
            raise ShapeMismatchError("parameter names differ")
        for name, value in other.items():
            if np.shape(value) != self._values[name].shape:
                raise ShapeMismatchError(f"{name}: shape {np.shape(value)} != {self._values[name].shape}")

    def on_tape(self, tape: Tape | None) -> dict[str, Tensor]:
        """Register every parameter as a leaf of ``tape``; untracked tensors when ``tape`` is None."""
        if tape is None:
            return {name: Tensor(value) for name, value in self._values.items()}
        return {name: tape.leaf(name, value) for name, value in self._values.items()}

    def equals(self, other: "ParamStore") -> bool:
        return self.names == other.names and all(
            np.array_equal(self._values[name], other[name]) for name in self.names
        )
