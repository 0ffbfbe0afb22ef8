"""Immutable dense tensors and the reverse-mode gradient tape"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np


class ShapeError(ValueError):
    """Raised when operand shapes are inconsistent with an operation."""


class NonFiniteError(FloatingPointError):
    """Raised when an operation produces NaN or infinite values."""


class Tensor:
    """Dense, row-major, immutable array of real values.

    A tensor is a value: its data buffer is read-only after construction, so tensors
    may be shared freely between threads. Gradients are never stored on the tensor;
    they are returned by `GradTape.gradient`.

    Attributes:
        requires_grad (bool): whether operations on this tensor are recorded on the
            active gradient tape.
    """

    __slots__ = ("_data", "requires_grad")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        if dtype is None:
            dtype = data.dtype if isinstance(data, np.ndarray) and data.dtype.kind == "f" else np.float64
        array = np.array(data, dtype=dtype, copy=True)
        self._data = _validated(array)
        self.requires_grad = bool(requires_grad)

    @classmethod
    def _wrap(cls, array: np.ndarray, requires_grad: bool) -> Tensor:
        """Adopt a freshly computed array without copying it."""
        tensor = cls.__new__(cls)
        tensor._data = _validated(array)
        tensor.requires_grad = requires_grad
        return tensor

    @classmethod
    def zeros(cls, shape: Tuple[int, ...], dtype=None) -> Tensor:
        return cls(np.zeros(shape), dtype=dtype)

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the values."""
        return self._data

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype

    def numpy(self) -> np.ndarray:
        """Writable copy of the values."""
        return self._data.copy()

    def item(self) -> float:
        """The single value of a one-element tensor."""
        if self._data.size != 1:
            raise ShapeError(f"item() requires a single-element tensor, got shape {self.shape}")
        return float(self._data.reshape(-1)[0])

    def detach(self) -> Tensor:
        """Same values, never recorded on a tape."""
        return Tensor._wrap(self._data, requires_grad=False)

    def with_grad(self) -> Tensor:
        """Same values, recorded on the active tape."""
        return Tensor._wrap(self._data, requires_grad=True)

    def astype(self, dtype) -> Tensor:
        return Tensor(self._data, requires_grad=self.requires_grad, dtype=dtype)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    # pylint: disable=import-outside-toplevel
    def __add__(self, other: Tensor) -> Tensor:
        from mexformer.numerics import ops

        return ops.add(self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        from mexformer.numerics import ops

        return ops.subtract(self, other)

    def __mul__(self, other) -> Tensor:
        from mexformer.numerics import ops

        if isinstance(other, Tensor):
            return ops.multiply(self, other)
        return ops.scale(self, float(other))

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        from mexformer.numerics import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from mexformer.numerics import ops

        return ops.matmul(self, other)

    @property
    def T(self) -> Tensor:  # pylint: disable=invalid-name
        from mexformer.numerics import ops

        return ops.transpose(self)


def _validated(array: np.ndarray) -> np.ndarray:
    if any(dim < 1 for dim in array.shape):
        raise ShapeError(f"tensor dimensions must be positive, got shape {array.shape}")
    if not np.isfinite(array).all():
        raise NonFiniteError("tensor contains NaN or infinite values")
    array.setflags(write=False)
    return array


BackwardFunction = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass(frozen=True)
class TapeEntry:
    """One recorded operation: its output, its inputs, and how to pull a gradient back."""

    output: Tensor
    inputs: Tuple[Tensor, ...]
    backward: BackwardFunction


_ACTIVE_TAPES = threading.local()


def _tape_stack() -> List[GradTape]:
    if not hasattr(_ACTIVE_TAPES, "stack"):
        _ACTIVE_TAPES.stack = []
    return _ACTIVE_TAPES.stack


def current_tape() -> Optional[GradTape]:
    """The innermost tape activated on this thread, if any."""
    stack = _tape_stack()
    return stack[-1] if stack else None


class GradTape:
    """Ordered record of operations for reverse-mode accumulation.

    Use as a context manager; every operation whose inputs require gradients is
    recorded on the innermost active tape of the calling thread::

        with GradTape() as tape:
            loss = ...
        grads = tape.gradient(loss, params)

    A tape belongs to a single thread.
    """

    def __init__(self) -> None:
        self._entries: List[TapeEntry] = []

    def __enter__(self) -> GradTape:
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self._entries)

    def record(self, output: Tensor, inputs: Sequence[Tensor], backward: BackwardFunction) -> None:
        """Append one operation to the tape."""
        self._entries.append(TapeEntry(output, tuple(inputs), backward))

    def gradient(self, target: Tensor, sources: Sequence[Tensor]) -> List[np.ndarray]:
        """Replay the tape backward from a scalar target.

        Args:
            target: single-element tensor produced while this tape was active
            sources: tensors to differentiate with respect to

        Returns:
            one gradient array per source, with the source's shape. Sources the target
            does not depend on receive zeros.

        Raises:
            ShapeError: if the target has more than one element.
        """
        if target.size != 1:
            raise ShapeError(f"gradient target must be a scalar, got shape {target.shape}")
        grads = {id(target): np.ones_like(target.data)}
        for entry in reversed(self._entries):
            upstream = grads.get(id(entry.output))
            if upstream is None:
                continue
            for tensor, grad in zip(entry.inputs, entry.backward(upstream)):
                if grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                grads[key] = grad if key not in grads else grads[key] + grad
        return [np.array(grads.get(id(source), np.zeros_like(source.data))) for source in sources]
