"""The full clip classifier: per-frame encoder, temporal aggregator, classification head"""

from __future__ import annotations

import logging
import math
from typing import Dict, List, Mapping, Tuple

import numpy as np
from scipy.stats import truncnorm

from mexformer.model.aggregation import LSTM_GATES, aggregate
from mexformer.model.config import AggregatorKind, InitScheme, ModelSpec
from mexformer.model.encoder import encode_frame
from mexformer.model.head import classify, cross_entropy, predicted_class
from mexformer.model.weights import ModelWeights, scoped
from mexformer.numerics import ShapeError, Tensor

logger = logging.getLogger(__name__)

VIT_INIT_STD = 0.02
TRUNCATION = 2.0
_EMBEDDING_TABLES = ("embed.class_token", "embed.position")

Shape = Tuple[int, ...]


def expected_shapes(spec: ModelSpec) -> Dict[str, Shape]:
    """Name and shape of every parameter of ``spec``, in container order."""
    width = spec.width
    embed = spec.embed
    shapes: Dict[str, Shape] = {
        "embed.patch_fc.weight": (embed.patch_dim, width),
        "embed.patch_fc.bias": (width,),
        "embed.class_token": (1, width),
        "embed.position": (embed.sequence_length, width),
    }
    feedforward = spec.encoder.feedforward_width
    for layer in range(spec.encoder.layers):
        prefix = f"encoder.{layer}"
        shapes[f"{prefix}.ln1.gamma"] = (width,)
        shapes[f"{prefix}.ln1.beta"] = (width,)
        for projection in ("query", "key", "value", "output"):
            shapes[f"{prefix}.attn.{projection}.weight"] = (width, width)
            shapes[f"{prefix}.attn.{projection}.bias"] = (width,)
        shapes[f"{prefix}.ln2.gamma"] = (width,)
        shapes[f"{prefix}.ln2.beta"] = (width,)
        shapes[f"{prefix}.ff.fc1.weight"] = (width, feedforward)
        shapes[f"{prefix}.ff.fc1.bias"] = (feedforward,)
        shapes[f"{prefix}.ff.fc2.weight"] = (feedforward, width)
        shapes[f"{prefix}.ff.fc2.bias"] = (width,)
    if spec.aggregator == AggregatorKind.LSTM:
        for layer in range(spec.lstm_layers):
            for gate in LSTM_GATES:
                shapes[f"aggregator.lstm.{layer}.{gate}.weight"] = (2 * width, width)
                shapes[f"aggregator.lstm.{layer}.{gate}.bias"] = (width,)
    hidden = spec.hidden_width
    shapes["head.fc1.weight"] = (width, hidden)
    shapes["head.fc1.bias"] = (hidden,)
    shapes["head.fc2.weight"] = (hidden, spec.classes)
    shapes["head.fc2.bias"] = (spec.classes,)
    return shapes


def init_weights(spec: ModelSpec, seed: int = 0, dtype=np.float64) -> ModelWeights:
    """Fresh random weights for ``spec``.

    Patch, attention and feed-forward matrices are drawn from a zero-mean normal
    truncated at 2σ (σ = 0.02 for ``vit``, 1/√fan_in for ``fan_in``). The class token
    and position embeddings use σ = 0.02 under both schemes. LSTM matrices are uniform
    in ±1/√D and head matrices uniform in ±1/√fan_in. Biases and layer-norm shifts start
    at zero; layer-norm scales start at one.
    """
    rng = np.random.default_rng(seed)
    arrays = {}
    for name, shape in expected_shapes(spec).items():
        arrays[name] = _initial_value(name, shape, spec, rng).astype(dtype)
    return ModelWeights(arrays)


def _initial_value(name: str, shape: Shape, spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    if name.endswith(".gamma"):
        return np.ones(shape)
    if name in _EMBEDDING_TABLES:
        return _truncated_normal(VIT_INIT_STD, shape, rng)
    if not name.endswith(".weight"):
        return np.zeros(shape)
    if name.startswith("aggregator."):
        bound = 1.0 / math.sqrt(spec.width)
        return rng.uniform(-bound, bound, size=shape)
    if name.startswith("head."):
        bound = 1.0 / math.sqrt(shape[0])
        return rng.uniform(-bound, bound, size=shape)
    std = VIT_INIT_STD if spec.init == InitScheme.VIT else 1.0 / math.sqrt(shape[0])
    return _truncated_normal(std, shape, rng)


def _truncated_normal(std: float, shape: Shape, rng: np.random.Generator) -> np.ndarray:
    return truncnorm.rvs(-TRUNCATION, TRUNCATION, scale=std, size=shape, random_state=rng)


def check_weights(weights: Mapping[str, Tensor], spec: ModelSpec):
    """Verify that ``weights`` holds exactly the parameters of ``spec``.

    Raises:
        ShapeError: listing missing, unexpected and mis-shaped tensors
    """
    expected = expected_shapes(spec)
    problems = []
    missing = [name for name in expected if name not in weights]
    if missing:
        problems.append(f"missing {missing}")
    unexpected = [name for name in weights if name not in expected]
    if unexpected:
        problems.append(f"unexpected {unexpected}")
    for name, shape in expected.items():
        if name in weights and tuple(weights[name].shape) != shape:
            problems.append(f"{name} has shape {tuple(weights[name].shape)}, expected {shape}")
    if problems:
        raise ShapeError("weights do not match the model: " + "; ".join(problems))


def frame_features(frames: np.ndarray, weights: Mapping[str, Tensor], spec: ModelSpec) -> List[Tensor]:
    """1×D class feature of every frame of an (F, H, W, C) clip."""
    frames = np.asarray(frames)
    if frames.ndim != 4 or frames.shape[0] < 1:
        raise ShapeError(f"expected a clip shaped (F, H, W, C), got {frames.shape}")
    return [encode_frame(frame, weights, spec.embed, spec.encoder)[0] for frame in frames]


def forward_sample(frames: np.ndarray, weights: Mapping[str, Tensor], spec: ModelSpec) -> Tensor:
    """Class probabilities (1×C) of one clip: encode every frame, aggregate, classify."""
    features = frame_features(frames, weights, spec)
    clip_feature = aggregate(features, spec.aggregator, scoped(weights, "aggregator"), spec.lstm_layers)
    return classify(clip_feature, scoped(weights, "head"))


def predict(frames: np.ndarray, weights: Mapping[str, Tensor], spec: ModelSpec) -> int:
    """Most probable class index of one clip."""
    return predicted_class(forward_sample(frames, weights, spec))


def sample_loss(
    frames: np.ndarray, label: int, weights: Mapping[str, Tensor], spec: ModelSpec
) -> Tuple[Tensor, Tensor]:
    """Cross-entropy of one clip against its class index.

    Returns:
        (loss, probabilities)
    """
    probabilities = forward_sample(frames, weights, spec)
    return cross_entropy([probabilities], [label]), probabilities
