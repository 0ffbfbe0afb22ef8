"""Reading and writing raster frames"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Tuple

import numpy as np
from PIL import Image
from upath import UPath

from mexformer.io import file_io

_FORMATS = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}


def read_image(file_pointer: str | Path | UPath, grayscale: bool = False) -> np.ndarray:
    """Read an image file into an array of 0–255 float64 intensities.

    Args:
        file_pointer: image to read (any format Pillow understands)
        grayscale: convert to a single intensity plane with ITU-R BT.601 weights

    Returns:
        (H, W) array when grayscale or the file is single-channel, else (H, W, 3)

    Raises:
        FileNotFoundError: if the image does not exist
    """
    payload = file_io.load_bytes_from_file(file_pointer)
    with Image.open(io.BytesIO(payload)) as image:
        if grayscale:
            image = image.convert("L")
        elif image.mode not in ("L", "RGB"):
            image = image.convert("RGB")
        return np.asarray(image, dtype=np.float64)


def write_image(image: np.ndarray, file_pointer: str | Path | UPath):
    """Write an (H, W) or (H, W, 3) image as PNG or PPM, chosen by the file suffix.

    Float input is rounded and clipped to 0–255.

    Raises:
        ValueError: for an unsupported suffix or image shape
    """
    file_pointer = file_io.get_upath(file_pointer)
    image_format = _FORMATS.get(file_pointer.suffix.lower())
    if image_format is None:
        raise ValueError(f"unsupported image suffix for {file_pointer}; use one of {sorted(_FORMATS)}")
    image = np.asarray(image)
    if image.ndim not in (2, 3) or (image.ndim == 3 and image.shape[2] != 3):
        raise ValueError(f"expected an (H, W) or (H, W, 3) image, got shape {image.shape}")
    if image.dtype != np.uint8:
        image = np.clip(np.round(image), 0, 255).astype(np.uint8)
    buffer = io.BytesIO()
    Image.fromarray(image).save(buffer, format=image_format)
    file_io.write_bytes_to_file(file_pointer, buffer.getvalue())


def read_image_size(file_pointer: str | Path | UPath) -> Tuple[int, int]:
    """(width, height) of an image file, read from its header."""
    payload = file_io.load_bytes_from_file(file_pointer)
    with Image.open(io.BytesIO(payload)) as image:
        return image.size
