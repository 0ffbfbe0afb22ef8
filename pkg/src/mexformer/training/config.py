"""Optimisation settings"""

from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class TrainConfig(BaseModel):
    """SGD with momentum, coupled weight decay and a cosine learning-rate schedule.

    The number of epochs has no default and must always be given.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(default=1e-3, ge=0)
    weight_decay: float = Field(default=1e-4, ge=0)
    momentum: float = Field(default=0.9, ge=0)
    batch_size: int = Field(default=4, ge=1)
    epochs: int = Field(ge=0)
    min_learning_rate: float = Field(default=0.0, ge=0)
    seed: int = Field(default=0, ge=0)
    max_grad_norm: Optional[float] = Field(default=1.0, gt=0)
    """Bound on the global norm of each batch gradient; None disables clipping."""

    workers: int = Field(default=1, ge=1)
    """Threads computing per-sample gradients of a batch."""

    @model_validator(mode="after")
    def check_learning_rates(self) -> Self:
        if self.min_learning_rate > self.learning_rate:
            raise ValueError(
                f"minimum learning rate {self.min_learning_rate} exceeds learning rate {self.learning_rate}"
            )
        return self

    def steps_per_epoch(self, sample_count: int) -> int:
        return math.ceil(sample_count / self.batch_size)

    def total_steps(self, sample_count: int) -> int:
        return self.epochs * self.steps_per_epoch(sample_count)
