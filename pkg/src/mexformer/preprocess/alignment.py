"""Rigid face alignment and landmark-based square cropping"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from mexformer.preprocess.landmarks import BROW, CHIN, LOWER_LIP, NOSE_TIP, LandmarkSet


@dataclass(frozen=True)
class CropSpec:
    """Square crop centred on a point, with side length in pixels."""

    center: Tuple[float, float]
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError(f"crop side must be positive, got {self.side}")


@dataclass(frozen=True)
class RigidTransform:
    """Rotation by ``theta`` radians followed by translation, mapping (x, y) points.

    No scale and no reflection: the rotation part always has determinant +1.
    """

    theta: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    @property
    def rotation(self) -> np.ndarray:
        cos, sin = math.cos(self.theta), math.sin(self.theta)
        return np.array([[cos, -sin], [sin, cos]])

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    @property
    def matrix(self) -> np.ndarray:
        """3×3 homogeneous matrix acting on column vectors (x, y, 1)."""
        matrix = np.eye(3)
        matrix[:2, :2] = self.rotation
        matrix[:2, 2] = self.translation
        return matrix

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform an (n, 2) array of (x, y) points."""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation


def crop_square(apex_landmarks: LandmarkSet) -> CropSpec:
    """Square face crop from the apex-frame landmarks.

    The side is ``(y[8] − y[19]) + (y[8] − y[57])``, chin to brow plus chin to lower
    lip, and the centre is the nose tip (point 30).

    Raises:
        ValueError: if the landmarks give a non-positive side
    """
    y = apex_landmarks.y
    side = float((y[CHIN] - y[BROW]) + (y[CHIN] - y[LOWER_LIP]))
    if side <= 0:
        raise ValueError(f"degenerate landmarks: crop side {side} is not positive")
    return CropSpec(center=apex_landmarks.point(NOSE_TIP), side=side)


def align_rigid(frame_landmarks: LandmarkSet, reference_landmarks: LandmarkSet) -> RigidTransform:
    """Least-squares rotation and translation taking frame landmarks onto the reference.

    Minimises Σ‖R·p_i + t − q_i‖² over rotations R (det +1) and translations t, via
    the orthogonal Procrustes solution with the reflection case explicitly corrected.

    Raises:
        ValueError: if either landmark set has all points coincident
    """
    frame_points = frame_landmarks.points
    reference_points = reference_landmarks.points
    frame_centroid = frame_points.mean(axis=0)
    reference_centroid = reference_points.mean(axis=0)
    frame_centered = frame_points - frame_centroid
    reference_centered = reference_points - reference_centroid
    if not (np.abs(frame_centered).max() > 0 and np.abs(reference_centered).max() > 0):
        raise ValueError("degenerate landmarks: all points coincide")

    covariance = frame_centered.T @ reference_centered
    left, _, right_t = np.linalg.svd(covariance)
    reflection = np.sign(np.linalg.det(right_t.T @ left.T)) or 1.0
    rotation = right_t.T @ np.diag([1.0, reflection]) @ left.T
    translation = reference_centroid - rotation @ frame_centroid
    theta = math.atan2(rotation[1, 0], rotation[0, 0])
    return RigidTransform(theta=theta, tx=float(translation[0]), ty=float(translation[1]))


def warp_frame(frame: np.ndarray, transform: RigidTransform) -> np.ndarray:
    """Resample a frame so that pixel content at p moves to ``transform.apply(p)``.

    Bilinear sampling with edge replication; the output has the input's shape.
    """
    frame = np.asarray(frame, dtype=np.float64)
    inverse_rotation = transform.rotation.T
    # (x, y) -> (row, column) ordering
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    matrix = swap @ inverse_rotation @ swap
    offset = swap @ (-inverse_rotation @ transform.translation)
    if frame.ndim == 2:
        return ndimage.affine_transform(frame, matrix, offset=offset, order=1, mode="nearest")
    return np.stack(
        [
            ndimage.affine_transform(frame[..., channel], matrix, offset=offset, order=1, mode="nearest")
            for channel in range(frame.shape[2])
        ],
        axis=-1,
    )


def crop_and_resize(frame: np.ndarray, crop: CropSpec, size: int) -> np.ndarray:
    """Cut the square crop out of a frame and resample it to ``size``×``size``.

    Pixels outside the frame replicate the nearest edge.
    """
    if size < 1:
        raise ValueError(f"output size must be positive, got {size}")
    frame = np.asarray(frame, dtype=np.float64)
    step = crop.side / size
    start_x = crop.center[0] - crop.side / 2.0
    start_y = crop.center[1] - crop.side / 2.0
    samples = (np.arange(size) + 0.5) * step - 0.5
    rows, columns = np.meshgrid(start_y + samples, start_x + samples, indexing="ij")
    if frame.ndim == 2:
        return ndimage.map_coordinates(frame, [rows, columns], order=1, mode="nearest")
    return np.stack(
        [
            ndimage.map_coordinates(frame[..., channel], [rows, columns], order=1, mode="nearest")
            for channel in range(frame.shape[2])
        ],
        axis=-1,
    )


def center_crop(frame: np.ndarray) -> CropSpec:
    """Largest centred square of a frame, used when no landmarks are available."""
    height, width = np.asarray(frame).shape[:2]
    return CropSpec(center=(width / 2.0, height / 2.0), side=float(min(height, width)))
