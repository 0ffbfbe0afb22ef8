"""Coarse-to-fine Horn–Schunck optical flow with warping"""

from __future__ import annotations

import logging
from typing import List, Tuple

import numba
import numpy as np
from numba import njit
from scipy import ndimage

from mexformer.flow.flow_field import FlowField, FlowParams

logger = logging.getLogger(__name__)

MINIMUM_IMAGE_SIDE = 8
MINIMUM_LEVEL_SIDE = 4
PRESMOOTHING_SIGMA = 1.0

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
"""ITU-R BT.601 luma weights for R, G, B."""


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Convert an image to a single float64 intensity plane on its original scale.

    Args:
        image: (H, W) grayscale, or (H, W, C) with C = 3 or 4 (alpha is ignored)

    Returns:
        (H, W) float64 array
    """
    image = np.asarray(image)
    if image.ndim == 2:
        return image.astype(np.float64)
    if image.ndim == 3 and image.shape[2] in (3, 4):
        return image[..., :3].astype(np.float64) @ np.asarray(LUMA_WEIGHTS)
    raise ValueError(f"expected a grayscale or RGB image, got shape {image.shape}")


def warp_image(image: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Backward-warp an image: ``result[y, x] = image[y + v, x + u]``.

    Sampling is bilinear, with edge pixels replicated outside the frame.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.shape != u.shape or image.shape != v.shape:
        raise ValueError(f"flow of shape {u.shape} cannot warp an image of shape {image.shape}")
    rows, columns = np.mgrid[0 : image.shape[0], 0 : image.shape[1]].astype(np.float64)
    return ndimage.map_coordinates(image, [rows + v, columns + u], order=1, mode="nearest")


def estimate_flow(reference: np.ndarray, target: np.ndarray, params: FlowParams | None = None) -> FlowField:
    """Dense flow from ``reference`` to ``target``.

    Each pyramid level (coarse to fine) warps the target by the upsampled flow of the
    coarser level, then runs ``params.iterations`` Jacobi sweeps of the linearised
    Horn–Schunck equations with regulariser weight ``smoothness_weight²``.

    Args:
        reference: grayscale image, intensities on the 0–255 scale
        target: grayscale image of the same dimensions
        params: estimator settings (defaults when omitted)

    Returns:
        FlowField such that ``target[y + v, x + u] ≈ reference[y, x]``

    Raises:
        ValueError: if the images differ in size, are smaller than 8×8, or are too
            small for the requested number of pyramid levels.
    """
    params = params or FlowParams()
    reference = to_grayscale(reference)
    target = to_grayscale(target)
    if reference.shape != target.shape:
        raise ValueError(f"image dimensions differ: {reference.shape} vs {target.shape}")
    if min(reference.shape) < MINIMUM_IMAGE_SIDE:
        raise ValueError(
            f"images must be at least {MINIMUM_IMAGE_SIDE}x{MINIMUM_IMAGE_SIDE}, got {reference.shape}"
        )
    coarsest = min(reference.shape) / 2 ** (params.pyramid_levels - 1)
    if coarsest < MINIMUM_LEVEL_SIDE:
        raise ValueError(
            f"image of shape {reference.shape} is too small for {params.pyramid_levels} pyramid levels"
        )

    reference_pyramid = _pyramid(reference, params.pyramid_levels)
    target_pyramid = _pyramid(target, params.pyramid_levels)
    alpha_squared = float(params.smoothness_weight) ** 2

    u = np.zeros(reference_pyramid[-1].shape)
    v = np.zeros(reference_pyramid[-1].shape)
    for level in reversed(range(params.pyramid_levels)):
        level_reference = reference_pyramid[level]
        level_target = target_pyramid[level]
        if u.shape != level_reference.shape:
            u, v = _upsample_flow(u, v, level_reference.shape)
        warped = warp_image(level_target, u, v)
        grad_x, grad_y, grad_t = _derivatives(level_reference, warped)
        u, v = _horn_schunck_sweeps(
            np.ascontiguousarray(grad_x),
            np.ascontiguousarray(grad_y),
            np.ascontiguousarray(grad_t),
            np.ascontiguousarray(u),
            np.ascontiguousarray(v),
            alpha_squared,
            params.iterations,
        )
        logger.debug("flow level %d (%dx%d) done", level, *level_reference.shape[::-1])
    return FlowField(u, v)


def _pyramid(image: np.ndarray, levels: int) -> List[np.ndarray]:
    pyramid = [ndimage.gaussian_filter(image, PRESMOOTHING_SIGMA, mode="nearest")]
    for _ in range(1, levels):
        smoothed = ndimage.gaussian_filter(pyramid[-1], PRESMOOTHING_SIGMA, mode="nearest")
        pyramid.append(ndimage.zoom(smoothed, 0.5, order=1, mode="nearest", grid_mode=True))
    return pyramid


def _upsample_flow(u: np.ndarray, v: np.ndarray, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    row_factor = shape[0] / u.shape[0]
    column_factor = shape[1] / u.shape[1]
    factors = (row_factor, column_factor)
    upsampled_u = ndimage.zoom(u, factors, order=1, mode="nearest", grid_mode=True) * column_factor
    upsampled_v = ndimage.zoom(v, factors, order=1, mode="nearest", grid_mode=True) * row_factor
    return upsampled_u, upsampled_v


def _derivatives(reference: np.ndarray, warped: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reference_dy, reference_dx = np.gradient(reference)
    warped_dy, warped_dx = np.gradient(warped)
    return 0.5 * (reference_dx + warped_dx), 0.5 * (reference_dy + warped_dy), warped - reference


# numba jit compiler doesn't count for coverage tests, so we'll set no cover.
@njit(
    numba.types.UniTuple(numba.float64[:, ::1], 2)(
        numba.float64[:, ::1],
        numba.float64[:, ::1],
        numba.float64[:, ::1],
        numba.float64[:, ::1],
        numba.float64[:, ::1],
        numba.float64,
        numba.int64,
    )
)
def _horn_schunck_sweeps(
    grad_x, grad_y, grad_t, initial_u, initial_v, alpha_squared, iterations
):  # pragma: no cover
    """Jacobi sweeps for the flow increment around an initial flow.

    The smoothness term acts on the total flow; the data term is linearised around
    the initial flow. Neighbourhood averages use the 1/6 edge, 1/12 corner stencil
    with replicated borders.
    """
    height, width = grad_x.shape
    u = initial_u.copy()
    v = initial_v.copy()
    next_u = np.empty_like(u)
    next_v = np.empty_like(v)
    for _ in range(iterations):
        for row in range(height):
            up = max(row - 1, 0)
            down = min(row + 1, height - 1)
            for column in range(width):
                left = max(column - 1, 0)
                right = min(column + 1, width - 1)
                mean_u = (u[up, column] + u[down, column] + u[row, left] + u[row, right]) / 6.0 + (
                    u[up, left] + u[up, right] + u[down, left] + u[down, right]
                ) / 12.0
                mean_v = (v[up, column] + v[down, column] + v[row, left] + v[row, right]) / 6.0 + (
                    v[up, left] + v[up, right] + v[down, left] + v[down, right]
                ) / 12.0
                ix = grad_x[row, column]
                iy = grad_y[row, column]
                residual = (
                    ix * (mean_u - initial_u[row, column])
                    + iy * (mean_v - initial_v[row, column])
                    + grad_t[row, column]
                ) / (alpha_squared + ix * ix + iy * iy)
                next_u[row, column] = mean_u - ix * residual
                next_v[row, column] = mean_v - iy * residual
        u, next_u = next_u, u
        v, next_v = next_v, v
    return u, v
