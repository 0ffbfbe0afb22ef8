"""Model-ready clips read back from preprocessing output"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List

import numpy as np
from upath import UPath

from mexformer.dataset.manifest import Manifest
from mexformer.flow.colorize import FlowInput, MaxMagnitude, flows_to_model_input
from mexformer.io import file_io, paths
from mexformer.io.flow_file import read_flow_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClipSample:
    """One clip as the model sees it: F input frames of shape (H, W, C) plus its label."""

    sample_id: str
    dataset: str
    subject_id: str
    label: str
    frames: np.ndarray

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim != 4 or frames.shape[0] < 1:
            raise ValueError(
                f"sample {self.sample_id}: frames must be shaped (F, H, W, C), got {frames.shape}"
            )
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def subject_key(self) -> str:
        return f"{self.dataset}/{self.subject_id}"

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def with_label(self, label: str) -> ClipSample:
        return replace(self, label=label)


def load_flow_samples(
    manifest: Manifest,
    flow_dir: str | Path | UPath,
    flow_input: FlowInput | str = FlowInput.COLOR,
    max_magnitude: MaxMagnitude = "auto",
) -> List[ClipSample]:
    """Read the flow files written by preprocessing for every manifest record.

    Args:
        manifest: records to load, in manifest order
        flow_dir: preprocessing output directory
        flow_input: colourised or raw model input
        max_magnitude: colourisation scale; ``"auto"`` scales each clip by its own maximum

    Raises:
        FileNotFoundError: if a record has no flow files
        ValueError: if a flow file is malformed or a clip's fields differ in size
    """
    samples = []
    for record in manifest:
        sample_dir = paths.sample_output_directory(flow_dir, record.sample_id)
        flow_paths = file_io.find_files_matching_path(sample_dir, f"{paths.FLOW_PREFIX}*{paths.FLOW_SUFFIX}")
        if not flow_paths:
            raise FileNotFoundError(f"sample {record.sample_id}: no flow files found in {sample_dir}")
        flow_paths = sorted(flow_paths, key=paths.flow_position_from_path)
        fields = [read_flow_file(flow_path) for flow_path in flow_paths]
        shapes = {(field.height, field.width) for field in fields}
        if len(shapes) > 1:
            raise ValueError(f"sample {record.sample_id}: flow fields have different sizes {sorted(shapes)}")
        samples.append(
            ClipSample(
                sample_id=record.sample_id,
                dataset=record.dataset,
                subject_id=record.subject_id,
                label=record.label,
                frames=flows_to_model_input(fields, flow_input, max_magnitude),
            )
        )
    logger.info("loaded %d preprocessed samples from %s", len(samples), flow_dir)
    return samples
