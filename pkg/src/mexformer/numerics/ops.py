"""Differentiable tensor operations.

Every operation checks operand shapes explicitly (there is no implicit broadcasting),
refuses to produce non-finite values, and records itself on the active `GradTape`
when any input requires a gradient.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence, Tuple

import numpy as np
from scipy import special

from mexformer.numerics.tensor import BackwardFunction, ShapeError, Tensor, current_tape

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_GELU_TANH_COEFFICIENT = 0.044715


class Activation(str, Enum):
    """Elementwise non-linearities"""

    GELU = "gelu"
    GELU_TANH = "gelu_tanh"
    SIGMOID = "sigmoid"
    TANH = "tanh"


def _result(data: np.ndarray, inputs: Sequence[Tensor], backward: BackwardFunction) -> Tensor:
    requires_grad = any(tensor.requires_grad for tensor in inputs)
    output = Tensor._wrap(np.asarray(data), requires_grad)  # pylint: disable=protected-access
    tape = current_tape()
    if requires_grad and tape is not None:
        tape.record(output, inputs, backward)
    return output


def _require_same_shape(name: str, left: Tensor, right: Tensor):
    if left.shape != right.shape:
        raise ShapeError(f"{name}: operand shapes differ, {left.shape} vs {right.shape}")


def _require_ndim(name: str, tensor: Tensor, ndim: int):
    if tensor.ndim != ndim:
        raise ShapeError(f"{name}: expected a {ndim}-d tensor, got shape {tensor.shape}")


def matmul(left: Tensor, right: Tensor) -> Tensor:
    """Matrix product of an m×k and a k×n tensor.

    Raises:
        ShapeError: if either operand is not 2-d or the inner dimensions differ.
    """
    _require_ndim("matmul", left, 2)
    _require_ndim("matmul", right, 2)
    if left.shape[1] != right.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {left.shape} @ {right.shape}")
    a, b = left.data, right.data
    return _result(a @ b, (left, right), lambda grad: (grad @ b.T, a.T @ grad))


def add(left: Tensor, right: Tensor) -> Tensor:
    _require_same_shape("add", left, right)
    return _result(left.data + right.data, (left, right), lambda grad: (grad, grad))


def subtract(left: Tensor, right: Tensor) -> Tensor:
    _require_same_shape("subtract", left, right)
    return _result(left.data - right.data, (left, right), lambda grad: (grad, -grad))


def multiply(left: Tensor, right: Tensor) -> Tensor:
    """Elementwise product of equally shaped tensors."""
    _require_same_shape("multiply", left, right)
    a, b = left.data, right.data
    return _result(a * b, (left, right), lambda grad: (grad * b, grad * a))


def scale(tensor: Tensor, factor: float) -> Tensor:
    factor = float(factor)
    return _result(tensor.data * factor, (tensor,), lambda grad: (grad * factor,))


def add_bias(tensor: Tensor, bias: Tensor) -> Tensor:
    """Add a length-d bias vector to every row of an n×d tensor."""
    _require_ndim("add_bias", tensor, 2)
    _require_ndim("add_bias", bias, 1)
    if tensor.shape[1] != bias.shape[0]:
        raise ShapeError(f"add_bias: bias of length {bias.shape[0]} for rows of width {tensor.shape[1]}")
    return _result(tensor.data + bias.data, (tensor, bias), lambda grad: (grad, grad.sum(axis=0)))


def transpose(tensor: Tensor) -> Tensor:
    _require_ndim("transpose", tensor, 2)
    return _result(tensor.data.T.copy(), (tensor,), lambda grad: (grad.T,))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Join tensors along an existing axis; all other dimensions must agree."""
    if len(tensors) == 0:
        raise ShapeError("concat: nothing to concatenate")
    ndim = tensors[0].ndim
    axis = axis % ndim
    for tensor in tensors:
        if tensor.ndim != ndim or any(
            tensor.shape[dim] != tensors[0].shape[dim] for dim in range(ndim) if dim != axis
        ):
            raise ShapeError(f"concat: incompatible shapes {[t.shape for t in tensors]} along axis {axis}")
    boundaries = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

    def backward(grad):
        return np.split(grad, boundaries, axis=axis)

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward)


def take_slice(tensor: Tensor, start: int, stop: int, axis: int = 0) -> Tensor:
    """Contiguous sub-range [start, stop) along one axis."""
    axis = axis % tensor.ndim
    if not 0 <= start < stop <= tensor.shape[axis]:
        raise ShapeError(f"take_slice: range [{start}, {stop}) outside axis of length {tensor.shape[axis]}")
    index = tuple(slice(start, stop) if dim == axis else slice(None) for dim in range(tensor.ndim))
    shape = tensor.shape

    def backward(grad):
        full = np.zeros(shape, dtype=grad.dtype)
        full[index] = grad
        return (full,)

    return _result(tensor.data[index].copy(), (tensor,), backward)


def take(tensor: Tensor, index: Tuple[int, ...]) -> Tensor:
    """Single element as a scalar tensor."""
    if len(index) != tensor.ndim or any(not 0 <= i < n for i, n in zip(index, tensor.shape)):
        raise ShapeError(f"take: index {index} outside shape {tensor.shape}")
    shape = tensor.shape

    def backward(grad):
        full = np.zeros(shape, dtype=grad.dtype)
        full[index] = grad
        return (full,)

    return _result(np.array(tensor.data[index]), (tensor,), backward)


def total(tensor: Tensor) -> Tensor:
    """Sum of all elements, as a scalar tensor."""
    shape = tensor.shape
    return _result(np.array(tensor.data.sum()), (tensor,), lambda grad: (np.full(shape, grad),))


def log(tensor: Tensor, eps: float = 0.0) -> Tensor:
    """Natural logarithm, with inputs below `eps` clamped to `eps` (zero gradient there)."""
    data = tensor.data
    clamped = np.maximum(data, eps) if eps > 0 else data
    if np.any(clamped <= 0):
        raise ValueError("log: non-positive input")
    active = data >= eps if eps > 0 else np.ones(data.shape, dtype=bool)
    return _result(np.log(clamped), (tensor,), lambda grad: (np.where(active, grad / clamped, 0.0),))


def softmax(tensor: Tensor, axis: int = -1) -> Tensor:
    """Normalised exponentials along one axis, computed with max-subtraction.

    Raises:
        ShapeError: if the axis is empty.
    """
    if tensor.ndim == 0 or tensor.shape[axis] < 1:
        raise ShapeError(f"softmax: empty axis {axis} for shape {tensor.shape}")
    shifted = tensor.data - tensor.data.max(axis=axis, keepdims=True)
    exps = np.exp(shifted)
    probabilities = exps / exps.sum(axis=axis, keepdims=True)

    def backward(grad):
        inner = (grad * probabilities).sum(axis=axis, keepdims=True)
        return (probabilities * (grad - inner),)

    return _result(probabilities, (tensor,), backward)


def layer_norm(tensor: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-6) -> Tensor:
    """Normalise each vector along the last axis, then apply the gamma/beta affine map.

    The variance is the biased one (denominator D).
    """
    width = tensor.shape[-1]
    if gamma.shape != (width,) or beta.shape != (width,):
        raise ShapeError(
            f"layer_norm: affine parameters {gamma.shape}/{beta.shape} for vectors of width {width}"
        )
    x = tensor.data
    centered = x - x.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    normalized = centered * inv_std
    g, b = gamma.data, beta.data

    def backward(grad):
        flat_grad = grad.reshape(-1, width)
        flat_normalized = normalized.reshape(-1, width)
        d_normalized = grad * g
        d_input = inv_std * (
            d_normalized
            - d_normalized.mean(axis=-1, keepdims=True)
            - normalized * (d_normalized * normalized).mean(axis=-1, keepdims=True)
        )
        return (
            d_input,
            (flat_grad * flat_normalized).sum(axis=0),
            flat_grad.sum(axis=0),
        )

    return _result(normalized * g + b, (tensor, gamma, beta), backward)


def activation(tensor: Tensor, kind: Activation | str) -> Tensor:
    """Elementwise non-linearity.

    Args:
        tensor: input of any shape
        kind: one of ``gelu`` (exact, x·Φ(x)), ``gelu_tanh`` (tanh approximation),
            ``sigmoid`` or ``tanh``
    """
    kind = Activation(kind)
    x = tensor.data
    if kind == Activation.GELU:
        cdf = special.ndtr(x)
        pdf = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        derivative = cdf + x * pdf
        value = x * cdf
    elif kind == Activation.GELU_TANH:
        inner = _SQRT_2_OVER_PI * (x + _GELU_TANH_COEFFICIENT * x**3)
        tanh_inner = np.tanh(inner)
        value = 0.5 * x * (1.0 + tanh_inner)
        derivative = 0.5 * (1.0 + tanh_inner) + 0.5 * x * (1.0 - tanh_inner**2) * _SQRT_2_OVER_PI * (
            1.0 + 3.0 * _GELU_TANH_COEFFICIENT * x**2
        )
    elif kind == Activation.SIGMOID:
        value = special.expit(x)
        derivative = value * (1.0 - value)
    else:
        value = np.tanh(x)
        derivative = 1.0 - value**2
    return _result(value, (tensor,), lambda grad: (grad * derivative,))


def gelu(tensor: Tensor) -> Tensor:
    return activation(tensor, Activation.GELU)


def sigmoid(tensor: Tensor) -> Tensor:
    return activation(tensor, Activation.SIGMOID)


def tanh(tensor: Tensor) -> Tensor:
    return activation(tensor, Activation.TANH)


def linear(tensor: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """Fully connected map of each row: ``x·W + b``."""
    output = matmul(tensor, weight)
    return output if bias is None else add_bias(output, bias)
