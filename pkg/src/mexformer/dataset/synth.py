"""Synthetic micro-expression clips for desk-scale experiments.

Each clip shows a smooth textured background (fixed per subject) with a Gaussian blob
that moves along its class direction, displacement ramping 0 → peak → 0 with the
apex at the middle frame.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from upath import UPath

from mexformer.dataset.manifest import Manifest
from mexformer.dataset.sample_record import DatasetName, SampleRecord
from mexformer.io import file_io, paths
from mexformer.io.images import write_image
from mexformer.preprocess.landmarks import BROW, CHIN, LANDMARK_COUNT, LOWER_LIP, NOSE_TIP, LandmarkSet
from mexformer.preprocess.landmarks import write_landmark_file

logger = logging.getLogger(__name__)

BLOB_AMPLITUDE = 90.0


class SynthSpec(BaseModel):
    """Parameters of a synthetic dataset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = 0
    subjects: int = Field(default=4, ge=1)
    samples_per_subject: int = Field(default=2, ge=1)
    directions: List[float] = Field(default=[0.0, 120.0, 240.0], min_length=2)
    """One class per motion direction, in degrees (0 points right, 90 points down)."""

    image_size: int = Field(default=32, ge=8)
    frames: int = Field(default=11, ge=1)
    peak_displacement: float = Field(default=3.0, ge=0)
    """Blob displacement at the apex, in pixels; 0 gives static clips."""

    noise_std: float = Field(default=1.0, ge=0)
    blob_sigma: float = Field(default=3.0, gt=0)
    landmarks: bool = False
    """Also write a static 68-point landmark file per frame."""

    @field_validator("directions")
    @classmethod
    def distinct_directions(cls, directions: List[float]) -> List[float]:
        """Class names are derived from directions, so they must be distinct."""
        names = [direction_label(direction) for direction in directions]
        if len(set(names)) != len(names):
            raise ValueError(f"class directions must be distinct, got {directions}")
        return directions

    @property
    def class_names(self) -> List[str]:
        return [direction_label(direction) for direction in self.directions]

    @property
    def apex_index(self) -> int:
        return (self.frames - 1) // 2


def direction_label(degrees: float) -> str:
    """Class name of a motion direction, e.g. ``dir90``."""
    return f"dir{degrees:g}"


def displacement_profile(frames: int, peak: float) -> np.ndarray:
    """Blob displacement per frame: linear rise to ``peak`` at the middle frame, then linear fall."""
    apex = (frames - 1) // 2
    profile = np.zeros(frames)
    for index in range(frames):
        if index <= apex:
            profile[index] = index / apex if apex > 0 else 1.0
        else:
            tail = frames - 1 - apex
            profile[index] = (frames - 1 - index) / tail
    return peak * profile


def subject_background(spec: SynthSpec, subject: int) -> np.ndarray:
    """Smooth texture, with phases fixed by (seed, subject)."""
    rng = np.random.default_rng([spec.seed, subject])
    phases = rng.uniform(0.0, 2.0 * math.pi, size=3)
    size = spec.image_size
    rows, columns = np.mgrid[0:size, 0:size].astype(np.float64)
    return (
        110.0
        + 25.0 * np.sin(2 * math.pi * columns / 13.0 + phases[0])
        + 20.0 * np.cos(2 * math.pi * rows / 11.0 + phases[1])
        + 15.0 * np.sin(2 * math.pi * (rows + columns) / 17.0 + phases[2])
    )


def render_clip(spec: SynthSpec, subject: int, sample: int, direction: float) -> List[np.ndarray]:
    """Frames of one synthetic clip as uint8 grayscale arrays."""
    background = subject_background(spec, subject)
    rng = np.random.default_rng([spec.seed, subject, sample])
    size = spec.image_size
    rows, columns = np.mgrid[0:size, 0:size].astype(np.float64)
    center = (size - 1) / 2.0
    angle = math.radians(direction)
    frames = []
    for displacement in displacement_profile(spec.frames, spec.peak_displacement):
        blob_x = center + displacement * math.cos(angle)
        blob_y = center + displacement * math.sin(angle)
        blob = BLOB_AMPLITUDE * np.exp(
            -((columns - blob_x) ** 2 + (rows - blob_y) ** 2) / (2.0 * spec.blob_sigma**2)
        )
        noise = rng.normal(0.0, spec.noise_std, size=(size, size)) if spec.noise_std > 0 else 0.0
        frames.append(np.clip(np.round(background + blob + noise), 0, 255).astype(np.uint8))
    return frames


def synthetic_landmarks(image_size: int) -> LandmarkSet:
    """A static face layout whose crop covers the whole frame, centred on the nose tip."""
    center = image_size / 2.0
    angles = np.linspace(0.0, 2.0 * math.pi, LANDMARK_COUNT, endpoint=False)
    points = np.stack(
        [center + 0.3 * image_size * np.cos(angles), center + 0.35 * image_size * np.sin(angles)], axis=1
    )
    points[CHIN] = [center, center + 0.45 * image_size]
    points[BROW] = [center - 0.15 * image_size, center - 0.3 * image_size]
    points[LOWER_LIP] = [center, center + 0.2 * image_size]
    points[NOSE_TIP] = [center, center]
    return LandmarkSet(points)


def synth_generate(spec: SynthSpec, output_dir: str | Path | UPath) -> Manifest:
    """Write a synthetic dataset and its manifest.

    Layout::

        <output_dir>/manifest.csv
        <output_dir>/frames/<sample_id>/000000.png ...
        <output_dir>/landmarks/<sample_id>/000000.txt ...   (when spec.landmarks)

    Sample ``j`` of subject ``s`` gets class ``(s * samples_per_subject + j) % classes``,
    so every subject sees several classes when possible.

    Returns:
        the manifest, with directories relative to ``output_dir``

    Raises:
        OSError: if the output directory cannot be written
    """
    output_dir = file_io.get_upath(output_dir)
    file_io.make_directory(output_dir, exist_ok=True)
    landmarks = synthetic_landmarks(spec.image_size) if spec.landmarks else None
    records = []
    for subject in range(spec.subjects):
        for sample in range(spec.samples_per_subject):
            class_index = (subject * spec.samples_per_subject + sample) % len(spec.directions)
            sample_id = f"s{subject:02d}_{sample:02d}"
            frames_dir = f"{paths.FRAMES_DIR}/{sample_id}"
            file_io.make_directory(output_dir / frames_dir, exist_ok=True)
            for index, frame in enumerate(render_clip(spec, subject, sample, spec.directions[class_index])):
                write_image(frame, paths.frame_file(output_dir / frames_dir, index))
            landmarks_dir = None
            if landmarks is not None:
                landmarks_dir = f"{paths.LANDMARKS_DIR}/{sample_id}"
                file_io.make_directory(output_dir / landmarks_dir, exist_ok=True)
                for index in range(spec.frames):
                    write_landmark_file(landmarks, paths.landmark_file(output_dir / landmarks_dir, index))
            records.append(
                SampleRecord(
                    sample_id=sample_id,
                    dataset=DatasetName.SYNTH,
                    subject_id=f"sub{subject:02d}",
                    frames_dir=frames_dir,
                    onset=0,
                    apex=spec.apex_index,
                    offset=spec.frames - 1,
                    label=spec.class_names[class_index],
                    landmarks_dir=landmarks_dir,
                )
            )
    manifest = Manifest(records, output_dir)
    manifest.write_to_file(paths.manifest_file(output_dir))
    logger.info("wrote %d synthetic samples to %s", len(records), output_dir)
    return manifest
