"""Pre-LN transformer encoder layers and the per-frame encoder"""

from __future__ import annotations

from typing import Mapping, Tuple

import numpy as np

from mexformer.model.attention import multi_head
from mexformer.model.config import EmbedConfig, EncoderConfig
from mexformer.model.embedding import embed
from mexformer.model.weights import scoped
from mexformer.numerics import Tensor, add, gelu, layer_norm, linear, take_slice


def feed_forward(tokens: Tensor, weights: Mapping[str, Tensor]) -> Tensor:
    """Position-wise FC(D→4D), GELU, FC(4D→D)."""
    hidden = gelu(linear(tokens, weights["fc1.weight"], weights["fc1.bias"]))
    return linear(hidden, weights["fc2.weight"], weights["fc2.bias"])


def encoder_layer(tokens: Tensor, weights: Mapping[str, Tensor], config: EncoderConfig) -> Tensor:
    """One transformer layer with layer norm before each block and residuals after.

    Z′ = MSM(LN(Z)) + Z;  Z_out = PWFF(LN(Z′)) + Z′

    Args:
        tokens: (N+1)×D input sequence
        weights: one ``encoder.<l>`` scope (``ln1``, ``attn``, ``ln2``, ``ff``)
        config: encoder settings
    """
    eps = config.layer_norm_eps
    normed = layer_norm(tokens, weights["ln1.gamma"], weights["ln1.beta"], eps)
    attended = multi_head(
        normed, scoped(weights, "attn"), config.heads, config.attention_denominator
    )
    residual = add(attended, tokens)
    normed = layer_norm(residual, weights["ln2.gamma"], weights["ln2.beta"], eps)
    return add(feed_forward(normed, scoped(weights, "ff")), residual)


def encode_frame(
    image: np.ndarray,
    weights: Mapping[str, Tensor],
    embed_config: EmbedConfig,
    encoder_config: EncoderConfig,
) -> Tuple[Tensor, Tensor]:
    """Embed a frame and run it through the encoder stack.

    Returns:
        (class_feature, tokens): the 1×D final state of the class token Z_L[0] and
        the full (N+1)×D final sequence
    """
    tokens = embed(image, scoped(weights, "embed"), embed_config)
    for layer in range(encoder_config.layers):
        tokens = encoder_layer(tokens, scoped(weights, f"encoder.{layer}"), encoder_config)
    return take_slice(tokens, 0, 1, axis=0), tokens

