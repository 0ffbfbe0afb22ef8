"""Flat key = value settings shared by the command-line tools"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from jproperties import Properties
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator
from typing_extensions import Self
from upath import UPath

from mexformer.evaluation.labels import ProtocolKind
from mexformer.evaluation.protocol import ProtocolSpec
from mexformer.flow.colorize import FlowInput
from mexformer.flow.flow_field import FlowParams
from mexformer.io import file_io
from mexformer.model.config import (
    AggregatorKind,
    AttentionScale,
    EmbedConfig,
    EncoderConfig,
    InitScheme,
    ModelSpec,
)
from mexformer.preprocess.interpolation import InterpolationMode
from mexformer.preprocess.pipeline import FlowMode, PreprocessConfig
from mexformer.training.config import TrainConfig


class PipelineConfig(BaseModel):
    """Every setting of a preprocess / train / evaluate run.

    Defaults describe the small CPU model on 32×32 frames; the optimiser defaults
    are the published ones (lr 1e-3, weight decay 1e-4, momentum 0.9, batch 4).
    """

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=False)

    learning_rate: float = 1e-3
    weight_decay: float = 1e-4
    momentum: float = 0.9
    batch_size: int = 4
    epochs: Optional[int] = None
    """Required by ``train`` and ``evaluate``."""

    min_learning_rate: float = 0.0
    seed: int = 0
    max_grad_norm: float = Field(default=1.0, ge=0)
    """Gradient clipping threshold; 0 disables clipping."""

    workers: int = Field(default=1, ge=1)
    """Threads for per-sample gradients, preprocessing, and evaluation folds."""

    image_size: int = 32
    patch_size: int = 8
    width: int = 16
    layers: int = 2
    heads: int = 4
    attention_scale: AttentionScale = AttentionScale.MODEL_WIDTH
    aggregator: AggregatorKind = AggregatorKind.LSTM
    lstm_layers: int = 3
    head_hidden: Optional[int] = None
    init: InitScheme = InitScheme.VIT
    layer_norm_eps: float = 1e-6

    frame_count: int = 5
    smoothness_weight: float = 15.0
    flow_iterations: int = 100
    pyramid_levels: int = 3
    interpolation_mode: InterpolationMode = InterpolationMode.BLEND
    interpolate: bool = True
    flow_input: FlowInput = FlowInput.COLOR
    flow_mode: FlowMode = FlowMode.LONG_TERM
    max_magnitude: Optional[float] = None

    protocol: ProtocolKind = ProtocolKind.CDE
    dataset: Optional[List[str]] = None
    """Corpora to evaluate, space or comma separated; all when unset."""

    @field_validator("head_hidden", "max_magnitude", "epochs", mode="before")
    @classmethod
    def blank_as_none(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            return None
        return value

    @field_validator("dataset", mode="before")
    @classmethod
    def delimited_list(cls, value):
        """Convert a space- or comma-delimited string into a list of names."""
        if isinstance(value, str):
            return list(filter(None, re.split(";| |,|\n", value))) or None
        return value if value else None

    @field_serializer("dataset")
    def serialize_as_delimited_list(self, names: Optional[Iterable[str]]) -> Optional[str]:
        if not names:
            return None
        return " ".join(names)

    def train_config(self) -> TrainConfig:
        """Optimiser settings.

        Raises:
            ValueError: if ``epochs`` is unset
        """
        if self.epochs is None:
            raise ValueError("the number of epochs must be set (epochs=...)")
        return TrainConfig(
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs,
            min_learning_rate=self.min_learning_rate,
            seed=self.seed,
            max_grad_norm=self.max_grad_norm or None,
            workers=self.workers,
        )

    def model_spec(self, classes: int) -> ModelSpec:
        """Architecture for ``classes`` outputs, with input channels set by ``flow_input``."""
        return ModelSpec(
            embed=EmbedConfig(
                image_size=self.image_size,
                patch_size=self.patch_size,
                channels=self.flow_input.channels,
                width=self.width,
            ),
            encoder=EncoderConfig(
                layers=self.layers,
                heads=self.heads,
                width=self.width,
                attention_scale=self.attention_scale,
                layer_norm_eps=self.layer_norm_eps,
            ),
            aggregator=self.aggregator,
            lstm_layers=self.lstm_layers,
            head_hidden=self.head_hidden,
            classes=classes,
            init=self.init,
        )

    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig(
            image_size=self.image_size,
            frame_count=self.frame_count,
            flow_params=FlowParams(
                smoothness_weight=self.smoothness_weight,
                iterations=self.flow_iterations,
                pyramid_levels=self.pyramid_levels,
            ),
            interpolate=self.interpolate,
            interpolation_mode=self.interpolation_mode,
            flow_mode=self.flow_mode,
            max_magnitude=self.max_magnitude,
            workers=self.workers,
        )

    def protocol_spec(self) -> ProtocolSpec:
        return ProtocolSpec(kind=self.protocol, datasets=self.dataset)

    def with_overrides(self, overrides: Sequence[str]) -> Self:
        """Validated copy with ``key=value`` strings applied in order.

        Raises:
            ValueError: for a malformed override, an unknown key, or an invalid value
        """
        values = self.explicit_dict()
        for override in overrides:
            key, separator, value = override.partition("=")
            if not separator or not key.strip():
                raise ValueError(f"malformed override {override!r}; expected key=value")
            values[key.strip()] = value.strip()
        return self.__class__.model_validate(values)

    def explicit_dict(self) -> dict:
        """Settings as plain values, skipping unset optional keys."""
        return self.model_dump(mode="json", exclude_none=True)

    def __str__(self):
        return "".join(f"  {name} {value}\n" for name, value in self.explicit_dict().items())

    @classmethod
    def read_from_file(cls, file_pointer: str | Path | UPath) -> Self:
        """Read settings from a java-style properties file.

        Raises:
            FileNotFoundError: if the file does not exist
            ValueError: for unknown keys or invalid values
        """
        file_path = file_io.get_upath(file_pointer)
        if not file_io.does_file_or_directory_exist(file_path):
            raise FileNotFoundError(f"No configuration file found at {file_path}")
        properties = Properties()
        with file_path.open("rb") as _file:
            properties.load(_file, "utf-8")
        try:
            return cls.model_validate(properties.properties)
        except ValueError as error:
            raise ValueError(f"{file_path}: {error}") from error

    def to_properties_file(self, file_pointer: str | Path | UPath):
        """Write every set key to a java-style properties file."""
        # pylint: disable=protected-access
        parameters = {key: str(value) for key, value in self.explicit_dict().items()}
        properties = Properties()
        properties.properties = parameters
        properties._key_order = list(parameters.keys())
        file_path = file_io.get_upath(file_pointer)
        with file_path.open("wb") as _file:
            properties.store(_file, encoding="utf-8", initial_comments="mexformer settings", timestamp=False)


def load_pipeline_config(
    file_pointer: Optional[str | Path | UPath] = None, overrides: Sequence[str] = ()
) -> PipelineConfig:
    """Defaults, then the properties file when given, then ``key=value`` overrides."""
    config = PipelineConfig() if file_pointer is None else PipelineConfig.read_from_file(file_pointer)
    return config.with_overrides(overrides) if overrides else config
