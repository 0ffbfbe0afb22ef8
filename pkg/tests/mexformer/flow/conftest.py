import numpy as np
import pytest

# pylint: disable=missing-function-docstring


def _texture(width, height, shift_x=0.0, shift_y=0.0):
    rows, columns = np.mgrid[0:height, 0:width].astype(np.float64)
    x = columns - shift_x
    y = rows - shift_y
    return (
        128.0
        + 45.0 * np.sin(2 * np.pi * x / 23.0)
        + 35.0 * np.cos(2 * np.pi * y / 19.0)
        + 25.0 * np.sin(2 * np.pi * (x + y) / 29.0)
    )


def _blob(width, height, center_x, center_y, sigma=4.0, amplitude=120.0):
    rows, columns = np.mgrid[0:height, 0:width].astype(np.float64)
    return amplitude * np.exp(-((columns - center_x) ** 2 + (rows - center_y) ** 2) / (2 * sigma**2))


@pytest.fixture
def textured_image():
    """Factory for a smooth analytic texture, optionally translated by (shift_x, shift_y)."""
    return _texture


@pytest.fixture
def ramp_displacements():
    return [0, 1, 2, 3, 2, 1]


@pytest.fixture
def ramp_frames(ramp_displacements):
    """A blob moving right by 0,1,2,3,2,1 px over a static faint texture; apex at index 3."""
    background = 0.2 * (_texture(48, 48) - 128.0) + 60.0
    return [background + _blob(48, 48, 20.0 + shift, 24.0) for shift in ramp_displacements]
