from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
from upath import UPath

from mexformer.io import file_io

LANDMARK_COUNT = 68
CHIN = 8
BROW = 19
NOSE_TIP = 30
LOWER_LIP = 57


@dataclass(frozen=True, eq=False)
class LandmarkSet:
    """The 68 facial landmark points of one frame, as (x, y) pixel coordinates.

    Indices follow the common 68-point annotation (8 is the chin tip, 19 the middle of
    the left brow, 30 the nose tip, 57 the middle of the lower lip).
    """

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.shape != (LANDMARK_COUNT, 2):
            raise ValueError(f"expected {LANDMARK_COUNT} (x, y) landmarks, got array of shape {points.shape}")
        if not np.isfinite(points).all():
            raise ValueError("landmarks contain NaN or infinite values")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def point(self, index: int) -> Tuple[float, float]:
        return float(self.points[index, 0]), float(self.points[index, 1])

    def translated(self, dx: float, dy: float) -> LandmarkSet:
        return LandmarkSet(self.points + np.array([dx, dy]))


def read_landmark_file(file_pointer: str | Path | UPath) -> LandmarkSet:
    """Read a landmark file of 68 lines, each holding "x y".

    Blank lines are ignored.

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: if a line is malformed or the point count is not 68
    """
    file_pointer = file_io.get_upath(file_pointer)
    if not file_io.does_file_or_directory_exist(file_pointer):
        raise FileNotFoundError(f"No landmark file found at {file_pointer}")
    points = []
    for line_number, line in enumerate(file_io.load_text_file(file_pointer), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 2:
            raise ValueError(f"{file_pointer}:{line_number}: expected 'x y', got {line.strip()!r}")
        points.append([float(fields[0]), float(fields[1])])
    if len(points) != LANDMARK_COUNT:
        raise ValueError(f"{file_pointer}: expected {LANDMARK_COUNT} landmarks, found {len(points)}")
    return LandmarkSet(np.array(points))


def write_landmark_file(landmarks: LandmarkSet, file_pointer: str | Path | UPath):
    """Write landmarks in the 68-line "x y" format."""
    lines = [f"{x!r} {y!r}" for x, y in landmarks.points.tolist()]
    file_io.write_string_to_file(file_pointer, "\n".join(lines) + "\n")
