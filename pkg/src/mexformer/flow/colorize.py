from __future__ import annotations

from enum import Enum
from typing import Literal, Sequence, Union

import numpy as np
from matplotlib.colors import hsv_to_rgb

from mexformer.flow.flow_field import FlowField

MaxMagnitude = Union[float, Literal["auto"], None]


def flow_hsv(field: FlowField, max_magnitude: MaxMagnitude = "auto") -> np.ndarray:
    """Colour-wheel encoding of a flow field in HSV space, as floats in [0, 1].

    Hue is the flow angle ``atan2(v, u)`` mapped to [0, 1) (angle 0, pointing right,
    is red); saturation is the magnitude divided by ``max_magnitude`` and clamped at
    1; value is always 1, so zero flow is white.

    Args:
        field: flow to encode
        max_magnitude: saturation scale in pixels, or ``"auto"``/None for the
            field's own maximum magnitude

    Raises:
        ValueError: if an explicit max_magnitude is not positive
    """
    magnitude = field.magnitude()
    if max_magnitude is None or max_magnitude == "auto":
        scale = float(magnitude.max())
    else:
        scale = float(max_magnitude)
        if scale <= 0:
            raise ValueError(f"max_magnitude must be positive, got {max_magnitude}")
    hue = np.mod(np.arctan2(field.v, field.u) / (2.0 * np.pi), 1.0)
    if scale > 0:
        saturation = np.minimum(magnitude / scale, 1.0)
    else:
        saturation = np.zeros_like(magnitude)
    return np.stack([hue, saturation, np.ones_like(magnitude)], axis=-1)


def colorize_flow(field: FlowField, max_magnitude: MaxMagnitude = "auto") -> np.ndarray:
    """Render a flow field as an (H, W, 3) uint8 RGB image.

    See `flow_hsv` for the encoding.
    """
    rgb = hsv_to_rgb(flow_hsv(field, max_magnitude))
    return np.round(rgb * 255.0).astype(np.uint8)


class FlowInput(str, Enum):
    """How flow fields are presented to the model"""

    COLOR = "color"
    """colour-wheel RGB in [0, 1], three channels"""

    RAW = "raw"
    """the (u, v) components in pixels, two channels"""

    @property
    def channels(self) -> int:
        return 3 if self == FlowInput.COLOR else 2


def flows_to_model_input(
    fields: Sequence[FlowField],
    flow_input: FlowInput | str = FlowInput.COLOR,
    max_magnitude: MaxMagnitude = "auto",
) -> np.ndarray:
    """Stack flow fields into an (F, H, W, C) float64 array of model input frames.

    Colourised frames are scaled to [0, 1]. With ``"auto"`` the saturation scale is the
    largest magnitude over the whole sequence, so relative motion between frames is
    preserved.
    """
    flow_input = FlowInput(flow_input)
    if len(fields) == 0:
        raise ValueError("no flow fields to convert")
    if flow_input == FlowInput.RAW:
        return np.stack([np.stack([field.u, field.v], axis=-1) for field in fields])
    if max_magnitude is None or max_magnitude == "auto":
        largest = max(float(field.magnitude().max()) for field in fields)
        max_magnitude = largest if largest > 0 else "auto"
    return np.stack([colorize_flow(field, max_magnitude) / 255.0 for field in fields])
