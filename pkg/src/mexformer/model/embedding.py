"""Patch embedding: rasterised patches, a shared fully connected layer, class token and positions"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from mexformer.model.config import EmbedConfig
from mexformer.numerics import ShapeError, Tensor, add, concat, linear


def patchify(image: np.ndarray, patch_size: int) -> np.ndarray:
    """Split an H×W×C image into non-overlapping P×P patches.

    Patches come in row-major patch order; each is flattened row-major by
    (row, column, channel).

    Args:
        image: (H, W, C) array, or (H, W) for a single channel
        patch_size: P, which must divide H and W

    Returns:
        (N, P²·C) array with N = H·W/P²

    Raises:
        ShapeError: if P does not divide the image dimensions
    """
    image = np.asarray(image)
    if image.ndim == 2:
        image = image[..., np.newaxis]
    if image.ndim != 3:
        raise ShapeError(f"expected an (H, W, C) image, got shape {image.shape}")
    height, width, channels = image.shape
    if height % patch_size or width % patch_size:
        raise ShapeError(f"patch size {patch_size} does not divide image of shape {image.shape}")
    rows, columns = height // patch_size, width // patch_size
    blocks = image.reshape(rows, patch_size, columns, patch_size, channels).transpose(0, 2, 1, 3, 4)
    return blocks.reshape(rows * columns, patch_size * patch_size * channels)


def embed(image: np.ndarray, weights: Mapping[str, Tensor], config: EmbedConfig) -> Tensor:
    """Token sequence Z_0 of one frame.

    Z_0 = [x_class; X_p¹E; …; X_pᴺE] + E_pos, where the patch-wise fully connected
    layer (E with its bias) is shared across patches.

    Args:
        image: (H, W, C) frame matching ``config``
        weights: ``embed`` scope holding ``patch_fc.weight``, ``patch_fc.bias``,
            ``class_token`` (1×D) and ``position`` ((N+1)×D)
        config: embedding dimensions

    Returns:
        (N+1)×D tensor whose row 0 is the class token

    Raises:
        ShapeError: if the image or the weights do not match ``config``
    """
    image = np.asarray(image)
    if image.ndim == 2:
        image = image[..., np.newaxis]
    expected = (config.image_size, config.image_size, config.channels)
    if image.shape != expected:
        raise ShapeError(f"embed: expected a frame of shape {expected}, got {image.shape}")
    projection = weights["patch_fc.weight"]
    patches = Tensor(patchify(image, config.patch_size), dtype=projection.dtype)
    tokens = linear(patches, projection, weights["patch_fc.bias"])
    sequence = concat([weights["class_token"], tokens], axis=0)
    return add(sequence, weights["position"])
