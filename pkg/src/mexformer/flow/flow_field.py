from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class FlowParams(BaseModel):
    """Settings of the coarse-to-fine variational flow estimator."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    smoothness_weight: float = Field(default=15.0, gt=0)
    """Regulariser weight; enters the energy squared."""

    iterations: int = Field(default=100, ge=1)
    """Jacobi iterations per pyramid level."""

    pyramid_levels: int = Field(default=3, ge=1)


@dataclass(frozen=True, eq=False)
class FlowField:
    """Dense per-pixel displacement from a reference frame to a target frame.

    ``u`` is horizontal (columns, increasing right) and ``v`` is vertical (rows,
    increasing down), both in pixels and shaped (height, width).
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if u.ndim != 2 or u.shape != v.shape:
            raise ValueError(f"flow components must be matching 2-d arrays, got {u.shape} and {v.shape}")
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            raise ValueError("flow contains NaN or infinite values")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def zeros(cls, width: int, height: int) -> FlowField:
        return cls(np.zeros((height, width)), np.zeros((height, width)))

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]

    def magnitude(self) -> np.ndarray:
        """Per-pixel displacement length."""
        return np.hypot(self.u, self.v)

    def mean_magnitude(self, border: int = 0) -> float:
        return float(self._interior(self.magnitude(), border).mean())

    def mean_vector(self, border: int = 0) -> Tuple[float, float]:
        """Mean (u, v) over the field, ignoring ``border`` pixels on every side."""
        return (
            float(self._interior(self.u, border).mean()),
            float(self._interior(self.v, border).mean()),
        )

    def max_abs(self) -> float:
        return float(max(np.abs(self.u).max(), np.abs(self.v).max()))

    def scaled(self, factor: float) -> FlowField:
        return FlowField(self.u * factor, self.v * factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowField):
            return NotImplemented
        return np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)

    @staticmethod
    def _interior(values: np.ndarray, border: int) -> np.ndarray:
        if border == 0:
            return values
        if 2 * border >= min(values.shape):
            raise ValueError(f"border of {border} pixels leaves no interior in a {values.shape} field")
        return values[border:-border, border:-border]
