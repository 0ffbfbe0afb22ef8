"""Flow sequences over a clip, anchored at the onset frame or between neighbours"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from mexformer.flow.estimation import estimate_flow, to_grayscale
from mexformer.flow.flow_field import FlowField, FlowParams

logger = logging.getLogger(__name__)


def long_term_flow(
    frames: Sequence[np.ndarray],
    onset_index: int,
    params: FlowParams | None = None,
    workers: int = 1,
) -> List[FlowField]:
    """One flow field per frame, each from the onset frame to that frame.

    The field at ``onset_index`` is all zeros and is produced without running the
    estimator.

    Args:
        frames: ordered grayscale (or RGB) frames of equal size
        onset_index: index of the reference frame
        params: estimator settings
        workers: number of threads estimating fields concurrently; results are
            always ordered by frame index

    Raises:
        ValueError: if there are no frames or the onset index is out of range
    """
    if len(frames) == 0:
        raise ValueError("long-term flow needs at least one frame")
    if not 0 <= onset_index < len(frames):
        raise ValueError(f"onset index {onset_index} outside a sequence of {len(frames)} frames")
    grayscale = [to_grayscale(frame) for frame in frames]
    reference = grayscale[onset_index]
    pairs = [(reference, frame) if index != onset_index else None for index, frame in enumerate(grayscale)]
    return _run_pairs(pairs, reference.shape, params, workers)


def short_term_flow(
    frames: Sequence[np.ndarray],
    params: FlowParams | None = None,
    workers: int = 1,
) -> List[FlowField]:
    """One flow field per frame, each from the previous frame; the first field is zero."""
    if len(frames) == 0:
        raise ValueError("short-term flow needs at least one frame")
    grayscale = [to_grayscale(frame) for frame in frames]
    pairs = [None] + [(grayscale[index - 1], grayscale[index]) for index in range(1, len(grayscale))]
    return _run_pairs(pairs, grayscale[0].shape, params, workers)


def _run_pairs(pairs, shape: Tuple[int, int], params, workers: int) -> List[FlowField]:
    height, width = shape

    def compute(pair) -> FlowField:
        if pair is None:
            return FlowField.zeros(width, height)
        return estimate_flow(pair[0], pair[1], params)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            fields = list(executor.map(compute, pairs))
    else:
        fields = [compute(pair) for pair in pairs]
    logger.debug("computed %d flow fields", len(fields))
    return fields
