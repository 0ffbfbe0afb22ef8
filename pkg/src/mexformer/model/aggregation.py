"""Temporal aggregation of per-frame class features: running mean or stacked LSTM"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence

from mexformer.model.config import AggregatorKind
from mexformer.model.weights import scoped
from mexformer.numerics import Tensor, add, concat, linear, multiply, scale, sigmoid, tanh

LSTM_GATES = ("forget", "input", "output", "cell")


def mean_aggregate(features: Sequence[Tensor]) -> Tensor:
    """Running mean Zᵗ = ((t−1)/t)·Zᵗ⁻¹ + (1/t)·featureₜ over 1×D features.

    Raises:
        ValueError: for an empty feature list
    """
    if len(features) == 0:
        raise ValueError("cannot aggregate an empty feature sequence")
    running = features[0]
    for step, feature in enumerate(features[1:], start=2):
        running = add(scale(running, (step - 1) / step), scale(feature, 1.0 / step))
    return running


@dataclass(frozen=True)
class LSTMState:
    """Hidden and cell rows (1×D) of one LSTM layer."""

    hidden: Tensor
    cell: Tensor

    @classmethod
    def zeros(cls, width: int, dtype=None) -> LSTMState:
        return cls(Tensor.zeros((1, width), dtype=dtype), Tensor.zeros((1, width), dtype=dtype))


def lstm_step(inputs: Tensor, state: LSTMState, weights: Mapping[str, Tensor]) -> LSTMState:
    """Advance one LSTM layer by one time step.

    Every gate reads the concatenation [hᵗ⁻¹, xᵗ] through a 2D×D weight::

        f = σ(W_f·[h, x] + b_f)    i = σ(W_i·[h, x] + b_i)    o = σ(W_o·[h, x] + b_o)
        C′ = tanh(W_C·[h, x] + b_C)
        C = f ⊙ C_prev + i ⊙ C′
        h = o ⊙ tanh(C)

    Args:
        inputs: 1×D input row (the layer below's hidden state, or the frame feature)
        state: previous state of this layer
        weights: one ``aggregator.lstm.<l>`` scope with ``<gate>.weight``/``<gate>.bias``
    """
    joined = concat([state.hidden, inputs], axis=1)

    def gate(name):
        return linear(joined, weights[f"{name}.weight"], weights[f"{name}.bias"])

    forget = sigmoid(gate("forget"))
    remember = sigmoid(gate("input"))
    expose = sigmoid(gate("output"))
    candidate = tanh(gate("cell"))
    cell = add(multiply(forget, state.cell), multiply(remember, candidate))
    return LSTMState(hidden=multiply(expose, tanh(cell)), cell=cell)


def lstm_aggregate(features: Sequence[Tensor], weights: Mapping[str, Tensor], layers: int) -> Tensor:
    """Run ``layers`` stacked LSTM layers over the features from zero state.

    Returns:
        the top layer's final hidden state
    """
    if len(features) == 0:
        raise ValueError("cannot aggregate an empty feature sequence")
    width = features[0].shape[1]
    states: List[LSTMState] = [LSTMState.zeros(width, features[0].dtype) for _ in range(layers)]
    scopes = [scoped(weights, f"lstm.{layer}") for layer in range(layers)]
    for feature in features:
        signal = feature
        for layer in range(layers):
            states[layer] = lstm_step(signal, states[layer], scopes[layer])
            signal = states[layer].hidden
    return states[-1].hidden


def aggregate(
    features: Sequence[Tensor],
    kind: AggregatorKind | str,
    weights: Optional[Mapping[str, Tensor]] = None,
    layers: int = 3,
) -> Tensor:
    """Reduce F ordered 1×D frame features to one 1×D clip feature.

    Args:
        features: per-frame class features in temporal order
        kind: ``mean`` or ``lstm``
        weights: ``aggregator`` scope holding ``lstm.<l>.<gate>.{weight,bias}``; only
            needed for ``lstm``
        layers: number of stacked LSTM layers

    Raises:
        ValueError: on an empty sequence, or missing LSTM weights
    """
    kind = AggregatorKind(kind)
    if kind == AggregatorKind.MEAN:
        return mean_aggregate(features)
    required = [f"lstm.{layer}.{gate}.weight" for layer in range(layers) for gate in LSTM_GATES]
    if weights is None or any(name not in weights for name in required):
        raise ValueError(f"missing LSTM weights for a {layers}-layer aggregator")
    return lstm_aggregate(features, weights, layers)

