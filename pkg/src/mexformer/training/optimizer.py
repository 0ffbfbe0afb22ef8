"""Stochastic gradient descent with momentum and coupled weight decay"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from mexformer.model.weights import ModelWeights
from mexformer.numerics import NonFiniteError, ShapeError, Tensor

_UNDECAYED_SUFFIXES = (".bias", ".gamma", ".beta", ".class_token", ".position")


def applies_weight_decay(name: str) -> bool:
    """Whether a parameter is decayed: everything except biases, layer norms, class token and positions."""
    return not name.endswith(_UNDECAYED_SUFFIXES)


@dataclass(frozen=True)
class OptimizerState:
    """One velocity buffer per trainable tensor, shaped like it."""

    velocity: Dict[str, np.ndarray]

    @classmethod
    def zeros(cls, params: Mapping[str, Tensor | np.ndarray]) -> OptimizerState:
        return cls({name: np.zeros_like(_array(value)) for name, value in params.items()})


def global_norm(grads: Mapping[str, np.ndarray]) -> float:
    """Euclidean norm of all gradients taken together as one vector."""
    return math.sqrt(sum(float(np.sum(np.square(grad))) for grad in grads.values()))


def clip_by_global_norm(grads: Mapping[str, np.ndarray], max_norm: float) -> Dict[str, np.ndarray]:
    """Scale every gradient by one factor so that their global norm is at most ``max_norm``.

    Raises:
        ValueError: if ``max_norm`` is not positive
    """
    if max_norm <= 0:
        raise ValueError(f"maximum gradient norm must be positive, got {max_norm}")
    norm = global_norm(grads)
    if norm <= max_norm:
        return dict(grads)
    scale = max_norm / norm
    return {name: grad * scale for name, grad in grads.items()}


def sgd_momentum_step(
    params: Mapping[str, Tensor | np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: OptimizerState,
    lr: float,
    momentum: float,
    weight_decay: float,
    decay_filter: Optional[Callable[[str], bool]] = applies_weight_decay,
    max_grad_norm: Optional[float] = None,
) -> Tuple[ModelWeights, OptimizerState]:
    """One update of every parameter::

        grad ← grad · min(1, max_grad_norm / ‖grads‖)   (when ``max_grad_norm`` is set)
        g ← grad + weight_decay·param      (for parameters passing ``decay_filter``)
        v ← momentum·v + g
        param ← param − lr·v

    Args:
        params: current parameters
        grads: gradient for every parameter
        state: velocities from the previous step
        decay_filter: selects the decayed parameters; None decays all of them
        max_grad_norm: bound on the global norm of the raw gradients; None leaves them as they are

    Returns:
        (new parameters, new state); the inputs are not modified

    Raises:
        ValueError: if a parameter has no gradient or velocity
        ShapeError: if a gradient or velocity is shaped unlike its parameter
        NonFiniteError: if a gradient is not finite
    """
    checked = {}
    for name, value in params.items():
        param = _array(value)
        if name not in grads or name not in state.velocity:
            raise ValueError(f"no gradient or velocity for parameter {name!r}")
        grad = np.asarray(grads[name])
        if grad.shape != param.shape or state.velocity[name].shape != param.shape:
            raise ShapeError(
                f"{name}: gradient {grad.shape} or velocity {state.velocity[name].shape} "
                f"does not match parameter {param.shape}"
            )
        if not np.isfinite(grad).all():
            raise NonFiniteError(f"non-finite gradient for parameter {name!r}")
        checked[name] = grad
    if max_grad_norm is not None:
        checked = clip_by_global_norm(checked, max_grad_norm)

    updated, velocity = {}, {}
    for name, value in params.items():
        param = _array(value)
        grad = checked[name]
        if weight_decay and (decay_filter is None or decay_filter(name)):
            grad = grad + weight_decay * param
        velocity[name] = (momentum * state.velocity[name] + grad).astype(param.dtype)
        updated[name] = (param - lr * velocity[name]).astype(param.dtype)
    return ModelWeights(updated), OptimizerState(velocity)


def _array(value: Tensor | np.ndarray) -> np.ndarray:
    return value.data if isinstance(value, Tensor) else np.asarray(value)
