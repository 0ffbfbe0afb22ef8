"""Methods for creating dataset and pipeline output paths"""

from __future__ import annotations

import re
from pathlib import Path

from upath import UPath

from mexformer.io.file_io.file_pointer import get_upath

MANIFEST_FILENAME = "manifest.csv"
FRAMES_DIR = "frames"
LANDMARKS_DIR = "landmarks"
CONFIG_FILENAME = "mexformer.properties"

FRAME_SUFFIX = ".png"
LANDMARK_SUFFIX = ".txt"
FLOW_SUFFIX = ".slfl"
FLOW_PREFIX = "flow_"
VISUALIZATION_PREFIX = "flow_"

_FLOW_FILE_PATTERN = re.compile(rf"^{FLOW_PREFIX}(\d+){re.escape(FLOW_SUFFIX)}$")


def frame_file(frames_dir: str | Path | UPath, frame_index: int) -> UPath:
    """Path of one frame image, named by its zero-padded index::

        <frames_dir>/000042.png
    """
    return get_upath(frames_dir) / f"{int(frame_index):06d}{FRAME_SUFFIX}"


def landmark_file(landmarks_dir: str | Path | UPath, frame_index: int) -> UPath:
    """Path of the landmark file bound to a frame index::

    <landmarks_dir>/000042.txt
    """
    return get_upath(landmarks_dir) / f"{int(frame_index):06d}{LANDMARK_SUFFIX}"


def sample_output_directory(output_dir: str | Path | UPath, sample_id: str) -> UPath:
    """Directory holding the preprocessed output of one sample.

    Raises:
        ValueError: if the sample id could escape the output directory
    """
    if not sample_id or "/" in sample_id or "\\" in sample_id or sample_id in (".", ".."):
        raise ValueError(f"sample id {sample_id!r} cannot be used as a directory name")
    return get_upath(output_dir) / sample_id


def flow_file_path(output_dir: str | Path | UPath, sample_id: str, position: int) -> UPath:
    """Path of the flow field at one selected position of a sample::

    <output_dir>/<sample_id>/flow_003.slfl
    """
    return sample_output_directory(output_dir, sample_id) / f"{FLOW_PREFIX}{int(position):03d}{FLOW_SUFFIX}"


def flow_visualization_file(output_dir: str | Path | UPath, sample_id: str, position: int) -> UPath:
    """Path of the colourised PNG of one flow field."""
    return sample_output_directory(output_dir, sample_id) / f"{VISUALIZATION_PREFIX}{int(position):03d}.png"


def flow_position_from_path(path: str | Path | UPath) -> int:
    """Recover the position from a flow file name like ``flow_003.slfl``.

    Raises:
        ValueError: if the name does not follow the flow file pattern
    """
    match = _FLOW_FILE_PATTERN.match(get_upath(path).name)
    if match is None:
        raise ValueError(f"not a flow file name: {path}")
    return int(match.group(1))


def manifest_file(dataset_dir: str | Path | UPath) -> UPath:
    return get_upath(dataset_dir) / MANIFEST_FILENAME
