"""Apex-prioritised temporal interpolation.

Frames are synthesised at half-integer timestamps closest to the apex first. When a
pass over the current sequence does not produce enough frames, the same rule runs
again on the denser sequence (quarter steps, then eighth steps, ...).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mexformer.flow.estimation import estimate_flow, to_grayscale, warp_image
from mexformer.flow.flow_field import FlowParams

logger = logging.getLogger(__name__)


class InterpolationMode(str, Enum):
    """How a frame between two neighbours is synthesised"""

    BLEND = "blend"
    FLOW_WARP = "flow_warp"


@dataclass(frozen=True)
class InterpolationPlan:
    """Ordered timestamps to synthesise between onset and offset."""

    timestamps: Tuple[float, ...]
    onset: int
    offset: int
    target_count: Optional[int] = None

    def __post_init__(self):
        if len(set(self.timestamps)) != len(self.timestamps):
            raise ValueError("interpolation plan contains duplicate timestamps")
        for timestamp in self.timestamps:
            if not self.onset < timestamp < self.offset:
                raise ValueError(
                    f"timestamp {timestamp} is not strictly inside ({self.onset}, {self.offset})"
                )

    def __len__(self) -> int:
        return len(self.timestamps)


def _single_pass(onset: int, apex: int, offset: int, half_step: float) -> List[float]:
    left = []
    step = half_step
    while apex - step >= onset + half_step:
        left.append(apex - step)
        step += 2 * half_step
    right = []
    step = half_step
    while apex + step <= offset - half_step:
        right.append(apex + step)
        step += 2 * half_step
    ordered = []
    for index in range(max(len(left), len(right))):
        if index < len(left):
            ordered.append(left[index])
        if index < len(right):
            ordered.append(right[index])
    return ordered


def build_interpolation_queue(
    onset: int, apex: int, offset: int, target_count: Optional[int] = None
) -> InterpolationPlan:
    """Order in which to synthesise frames so that the apex neighbourhood is densest.

    The first pass emits ``a−0.5, a+0.5, a−1.5, a+1.5, ...``, each side stopping at
    ``onset+0.5`` / ``offset−0.5``. While fewer than ``target_count`` timestamps have
    been emitted, further passes repeat the rule with half the step on the updated
    sequence. The result is truncated at ``target_count``.

    Args:
        onset: first frame index
        apex: peak frame index
        offset: last frame index
        target_count: number of frames to synthesise; None runs exactly one pass

    Raises:
        ValueError: unless onset ≤ apex ≤ offset and target_count ≥ 0
    """
    if not onset <= apex <= offset:
        raise ValueError(f"frame indices must satisfy onset <= apex <= offset, got {onset}, {apex}, {offset}")
    if target_count is not None and target_count < 0:
        raise ValueError(f"target_count must be non-negative, got {target_count}")

    timestamps: List[float] = []
    half_step = 0.5
    while True:
        emitted = _single_pass(onset, apex, offset, half_step)
        timestamps.extend(emitted)
        if target_count is None or len(timestamps) >= target_count or not emitted:
            break
        half_step /= 2
    if target_count is not None:
        timestamps = timestamps[:target_count]
    return InterpolationPlan(tuple(timestamps), onset, offset, target_count)


def interpolation_target(original_count: int, reference_count: float) -> int:
    """Frames to add so a clip of ``original_count`` frames reaches ``reference_count``."""
    return max(0, int(round(reference_count)) - int(original_count))


def interpolate_midpoint(
    left: np.ndarray,
    right: np.ndarray,
    mode: InterpolationMode | str = InterpolationMode.BLEND,
    params: FlowParams | None = None,
) -> np.ndarray:
    """Synthesise the frame halfway between two frames.

    ``blend`` averages the two frames pixelwise. ``flow_warp`` estimates the flow from
    left to right, moves both frames half way along it, and averages them.

    Raises:
        ValueError: if the frames differ in size
    """
    mode = InterpolationMode(mode)
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape:
        raise ValueError(f"frame dimensions differ: {left.shape} vs {right.shape}")
    if mode == InterpolationMode.BLEND:
        return 0.5 * (left + right)
    field = estimate_flow(to_grayscale(left), to_grayscale(right), params)
    half_u, half_v = 0.5 * field.u, 0.5 * field.v
    if left.ndim == 2:
        return 0.5 * (warp_image(left, -half_u, -half_v) + warp_image(right, half_u, half_v))
    channels = [
        0.5 * (warp_image(left[..., c], -half_u, -half_v) + warp_image(right[..., c], half_u, half_v))
        for c in range(left.shape[2])
    ]
    return np.stack(channels, axis=-1)


def apply_interpolation_plan(
    frames: Sequence[np.ndarray],
    plan: InterpolationPlan,
    mode: InterpolationMode | str = InterpolationMode.BLEND,
    params: FlowParams | None = None,
) -> Tuple[List[float], List[np.ndarray]]:
    """Synthesise every planned frame and merge it into the sequence.

    Each planned timestamp is built from its two temporal neighbours, which earlier
    entries of the plan (or the original frames) always provide.

    Args:
        frames: original frames for indices ``plan.onset`` … ``plan.offset``
        plan: timestamps to synthesise
        mode: midpoint synthesis method
        params: flow settings for ``flow_warp``

    Returns:
        (timestamps, frames), both sorted by time
    """
    if len(frames) != plan.offset - plan.onset + 1:
        raise ValueError(
            f"plan covers frames {plan.onset}..{plan.offset} but {len(frames)} frames were supplied"
        )
    available: Dict[float, np.ndarray] = {
        float(plan.onset + index): np.asarray(frame, dtype=np.float64) for index, frame in enumerate(frames)
    }
    for timestamp in plan.timestamps:
        half_step = 1.0 / Fraction(timestamp).denominator
        left, right = timestamp - half_step, timestamp + half_step
        if left not in available or right not in available:
            raise ValueError(f"neighbours of timestamp {timestamp} are not available")
        available[timestamp] = interpolate_midpoint(available[left], available[right], mode, params)
    ordered = sorted(available)
    logger.debug("interpolated %d frames, sequence now %d long", len(plan), len(ordered))
    return ordered, [available[timestamp] for timestamp in ordered]
