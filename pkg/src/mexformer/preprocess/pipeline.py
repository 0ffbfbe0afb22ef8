"""Per-sample preprocessing: alignment, cropping, interpolation, frame selection, flow"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from upath import UPath

from mexformer.dataset.manifest import Manifest
from mexformer.dataset.sample_record import SampleRecord
from mexformer.flow.colorize import colorize_flow
from mexformer.flow.flow_field import FlowField, FlowParams
from mexformer.flow.long_term import long_term_flow, short_term_flow
from mexformer.io import file_io, paths
from mexformer.io.flow_file import write_flow_file
from mexformer.io.images import read_image, write_image
from mexformer.preprocess.alignment import align_rigid, center_crop, crop_and_resize, crop_square, warp_frame
from mexformer.preprocess.frame_selection import DEFAULT_FRAME_COUNT, select_frames
from mexformer.preprocess.interpolation import (
    InterpolationMode,
    apply_interpolation_plan,
    build_interpolation_queue,
    interpolation_target,
)
from mexformer.preprocess.landmarks import read_landmark_file

logger = logging.getLogger(__name__)


class FlowMode(str, Enum):
    """Which frame each flow field is measured from"""

    LONG_TERM = "long_term"
    """from the onset frame"""

    SHORT_TERM = "short_term"
    """from the preceding selected frame"""


class PreprocessConfig(BaseModel):
    """Settings of the per-sample preprocessing pipeline."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    image_size: int = Field(default=384, ge=8)
    """Side of the square face crop fed to flow estimation and to the model."""

    frame_count: int = Field(default=DEFAULT_FRAME_COUNT, ge=1)
    flow_params: FlowParams = FlowParams()
    interpolate: bool = True
    """Interpolate every clip up to its dataset's mean frame count before selection."""

    interpolation_mode: InterpolationMode = InterpolationMode.BLEND
    flow_mode: FlowMode = FlowMode.LONG_TERM
    max_magnitude: Optional[float] = Field(default=None, gt=0)
    """Saturation scale for flow visualisations; None scales each sample by its own maximum."""

    workers: int = Field(default=1, ge=1)

    @field_validator("frame_count")
    @classmethod
    def odd_frame_count(cls, frame_count: int) -> int:
        if frame_count % 2 == 0:
            raise ValueError(f"frame count must be odd, got {frame_count}")
        return frame_count


@dataclass(frozen=True)
class PreparedSample:
    """Output of `prepare_record` for one clip.

    ``timestamps`` are the (possibly fractional) positions of the selected frames in
    the interpolated sequence, with 0 at the onset.
    """

    record: SampleRecord
    timestamps: List[float]
    frames: List[np.ndarray]
    fields: List[FlowField]

    @property
    def sample_id(self) -> str:
        return self.record.sample_id


def load_face_frames(manifest: Manifest, record: SampleRecord, image_size: int) -> List[np.ndarray]:
    """Grayscale onset…offset frames, aligned and cropped to ``image_size`` squares.

    With landmarks, every frame is rigidly aligned to the apex-frame landmarks and
    the landmark crop of the apex frame is cut out of it. Without landmarks the
    largest centred square is used.
    """
    frames = [read_image(frame_file, grayscale=True) for frame_file in manifest.frame_files(record)]
    landmark_files = manifest.landmark_files(record)
    if landmark_files is None:
        crop = center_crop(frames[0])
        return [crop_and_resize(frame, crop, image_size) for frame in frames]

    landmarks = [read_landmark_file(landmark_file) for landmark_file in landmark_files]
    reference = landmarks[record.resolved_apex - record.onset]
    crop = crop_square(reference)
    aligned = []
    for frame, frame_landmarks in zip(frames, landmarks):
        transform = align_rigid(frame_landmarks, reference)
        aligned.append(crop_and_resize(warp_frame(frame, transform), crop, image_size))
    return aligned


def prepare_record(
    manifest: Manifest, record: SampleRecord, config: PreprocessConfig | None = None
) -> PreparedSample:
    """Run the whole preprocessing chain on one manifest record.

    1. load, align and crop the onset…offset frames
    2. interpolate, apex first, up to the dataset's mean frame count
    3. select ``frame_count`` frames centred on the apex
    4. estimate one flow field per selected frame

    Raises:
        FileNotFoundError: if a frame or landmark file is missing
        ValueError: for degenerate landmarks or frames too small for flow estimation
    """
    config = config or PreprocessConfig()
    frames = load_face_frames(manifest, record, config.image_size)
    apex_position = record.resolved_apex - record.onset
    timestamps = [float(index) for index in range(len(frames))]

    if config.interpolate and len(frames) > 1:
        target = interpolation_target(len(frames), manifest.mean_frame_count(record.dataset))
        if target > 0:
            plan = build_interpolation_queue(0, apex_position, len(frames) - 1, target)
            timestamps, frames = apply_interpolation_plan(
                frames, plan, config.interpolation_mode, config.flow_params
            )
            logger.debug("sample %s: %d frames after interpolation", record.sample_id, len(frames))

    apex_index = timestamps.index(float(apex_position))
    selected = select_frames(len(frames), apex_index, config.frame_count)
    selected_frames = [frames[index] for index in selected]
    if config.flow_mode == FlowMode.LONG_TERM:
        fields = long_term_flow(
            [frames[0]] + selected_frames, 0, config.flow_params, workers=config.workers
        )[1:]
    else:
        fields = short_term_flow(selected_frames, config.flow_params, workers=config.workers)
    return PreparedSample(
        record=record,
        timestamps=[timestamps[index] for index in selected],
        frames=selected_frames,
        fields=fields,
    )


def write_prepared_sample(
    prepared: PreparedSample,
    output_dir: str | Path | UPath,
    visualize: bool = False,
    max_magnitude: Optional[float] = None,
) -> List[UPath]:
    """Write a sample's flow fields (and optionally their colourised PNGs).

    Returns:
        paths of the flow files, in selection order
    """
    file_io.make_directory(paths.sample_output_directory(output_dir, prepared.sample_id), exist_ok=True)
    scale = max_magnitude
    if scale is None:
        largest = max(float(field.magnitude().max()) for field in prepared.fields)
        scale = largest if largest > 0 else "auto"
    written = []
    for position, field in enumerate(prepared.fields):
        flow_path = paths.flow_file_path(output_dir, prepared.sample_id, position)
        write_flow_file(field, flow_path)
        written.append(flow_path)
        if visualize:
            image = colorize_flow(field, scale)
            write_image(image, paths.flow_visualization_file(output_dir, prepared.sample_id, position))
    return written


def preprocess_manifest(
    manifest: Manifest,
    output_dir: str | Path | UPath,
    config: PreprocessConfig | None = None,
    visualize: bool = False,
) -> List[PreparedSample]:
    """Preprocess every record of a manifest into ``<output_dir>/<sample_id>/flow_NNN.slfl``.

    Re-running on unchanged inputs rewrites identical files.
    """
    config = config or PreprocessConfig()
    file_io.make_directory(output_dir, exist_ok=True)
    prepared_samples = []
    for number, record in enumerate(manifest, start=1):
        prepared = prepare_record(manifest, record, config)
        write_prepared_sample(prepared, output_dir, visualize=visualize, max_magnitude=config.max_magnitude)
        prepared_samples.append(prepared)
        logger.info("preprocessed sample %s (%d of %d)", record.sample_id, number, len(manifest))
    return prepared_samples
