"""Architecture settings of the frame encoder, temporal aggregator, and classification head"""

from __future__ import annotations

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class AttentionScale(str, Enum):
    """Denominator of the attention logits"""

    MODEL_WIDTH = "model_width"
    """√D, the full token width"""

    HEAD_WIDTH = "head_width"
    """√(D/M), the per-head width"""


class AggregatorKind(str, Enum):
    """How per-frame features are reduced to one clip feature"""

    MEAN = "mean"
    LSTM = "lstm"

    @classmethod
    def all_kinds(cls):
        return [kind.value for kind in cls]


class InitScheme(str, Enum):
    """Distribution of the initial patch, attention and feed-forward weights"""

    VIT = "vit"
    """zero-mean normal, std 0.02, truncated at 2σ"""

    FAN_IN = "fan_in"
    """zero-mean normal, std 1/√fan_in, truncated at 2σ"""


class EmbedConfig(BaseModel):
    """Patch embedding of an H×W×C input frame into N+1 tokens of width D."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    image_size: int = Field(default=384, ge=1)
    patch_size: int = Field(default=16, ge=1)
    channels: int = Field(default=3, ge=1)
    width: int = Field(default=768, ge=1)

    @model_validator(mode="after")
    def check_patch_grid(self) -> Self:
        if self.image_size % self.patch_size != 0:
            raise ValueError(
                f"patch size {self.patch_size} does not divide the image size {self.image_size}"
            )
        return self

    @property
    def patch_count(self) -> int:
        """N = H·W / P²"""
        return (self.image_size // self.patch_size) ** 2

    @property
    def patch_dim(self) -> int:
        """Length P²·C of a flattened patch."""
        return self.patch_size * self.patch_size * self.channels

    @property
    def sequence_length(self) -> int:
        """N + 1, counting the class token."""
        return self.patch_count + 1


class EncoderConfig(BaseModel):
    """Stack of pre-LN transformer layers."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    layers: int = Field(default=12, ge=0)
    heads: int = Field(default=12, ge=1)
    width: int = Field(default=768, ge=1)
    attention_scale: AttentionScale = AttentionScale.MODEL_WIDTH
    layer_norm_eps: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def check_heads(self) -> Self:
        if self.width % self.heads != 0:
            raise ValueError(f"width {self.width} is not divisible by {self.heads} heads")
        return self

    @property
    def head_width(self) -> int:
        return self.width // self.heads

    @property
    def feedforward_width(self) -> int:
        return 4 * self.width

    @property
    def attention_denominator(self) -> float:
        if self.attention_scale == AttentionScale.HEAD_WIDTH:
            return math.sqrt(self.head_width)
        return math.sqrt(self.width)


class ModelSpec(BaseModel):
    """Full network: frame encoder, temporal aggregator, and classification head."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    embed: EmbedConfig = EmbedConfig()
    encoder: EncoderConfig = EncoderConfig()
    aggregator: AggregatorKind = AggregatorKind.LSTM
    lstm_layers: int = Field(default=3, ge=1)
    head_hidden: Optional[int] = Field(default=None, ge=1)
    """Hidden width of the head; None uses the token width."""

    classes: int = Field(default=3, ge=2)
    init: InitScheme = InitScheme.VIT

    @model_validator(mode="after")
    def check_widths(self) -> Self:
        if self.embed.width != self.encoder.width:
            raise ValueError(
                f"embedding width {self.embed.width} differs from encoder width {self.encoder.width}"
            )
        return self

    @property
    def width(self) -> int:
        return self.encoder.width

    @property
    def hidden_width(self) -> int:
        return self.head_hidden if self.head_hidden is not None else self.width

    @classmethod
    def desk(
        cls,
        classes: int = 3,
        aggregator: AggregatorKind | str = AggregatorKind.LSTM,
        channels: int = 3,
        image_size: int = 32,
        patch_size: int = 8,
        width: int = 16,
        layers: int = 2,
        heads: int = 4,
        **kwargs,
    ) -> ModelSpec:
        """Small model for CPU experiments: 32×32 frames, 8×8 patches, D=16, two layers of four heads."""
        attention_scale = kwargs.pop("attention_scale", AttentionScale.MODEL_WIDTH)
        return cls(
            embed=EmbedConfig(image_size=image_size, patch_size=patch_size, channels=channels, width=width),
            encoder=EncoderConfig(layers=layers, heads=heads, width=width, attention_scale=attention_scale),
            aggregator=aggregator,
            classes=classes,
            **kwargs,
        )
