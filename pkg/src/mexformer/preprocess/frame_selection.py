from __future__ import annotations

from typing import List, Optional

DEFAULT_FRAME_COUNT = 11


def select_frames(length: int, apex_index: int, frame_count: int = DEFAULT_FRAME_COUNT) -> List[int]:
    """Indices of the apex frame and the (F−1)/2 frames either side of it.

    Indices beyond either end of the sequence are clamped to it, so the boundary
    frame repeats and exactly ``frame_count`` indices come back in temporal order.

    Raises:
        ValueError: for an empty sequence, an apex outside it, or an even frame count
    """
    if length < 1:
        raise ValueError("cannot select frames from an empty sequence")
    if frame_count < 1 or frame_count % 2 == 0:
        raise ValueError(f"frame count must be a positive odd number, got {frame_count}")
    if not 0 <= apex_index < length:
        raise ValueError(f"apex index {apex_index} outside a sequence of {length} frames")
    half = (frame_count - 1) // 2
    return [min(max(apex_index + step, 0), length - 1) for step in range(-half, half + 1)]


def resolve_apex(onset: int, offset: int, apex: Optional[int] = None) -> int:
    """The annotated apex, or the middle frame when a clip has none."""
    if apex is not None:
        return int(apex)
    return (int(onset) + int(offset)) // 2
