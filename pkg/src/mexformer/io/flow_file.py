"""Binary flow field files.

Layout (all little-endian)::

    b"SLFL" | u32 width | u32 height | width*height (u, v) float32 pairs, row-major
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from upath import UPath

from mexformer.flow.flow_field import FlowField
from mexformer.io import file_io

FLOW_MAGIC = b"SLFL"
_HEADER_DTYPE = np.dtype("<u4")
_VALUE_DTYPE = np.dtype("<f4")
_HEADER_SIZE = len(FLOW_MAGIC) + 2 * _HEADER_DTYPE.itemsize


def encode_flow(field: FlowField) -> bytes:
    """Serialise a flow field; components are stored at 32-bit precision."""
    header = np.array([field.width, field.height], dtype=_HEADER_DTYPE).tobytes()
    pairs = np.stack([field.u, field.v], axis=-1).astype(_VALUE_DTYPE)
    return FLOW_MAGIC + header + pairs.tobytes()


def decode_flow(payload: bytes) -> FlowField:
    """Parse the bytes of a flow file.

    Raises:
        ValueError: for a wrong magic number or a payload of the wrong length
    """
    if payload[: len(FLOW_MAGIC)] != FLOW_MAGIC:
        raise ValueError("not a flow file (bad magic number)")
    if len(payload) < _HEADER_SIZE:
        raise ValueError("flow file truncated inside the header")
    width, height = np.frombuffer(payload, dtype=_HEADER_DTYPE, count=2, offset=len(FLOW_MAGIC))
    expected = _HEADER_SIZE + int(width) * int(height) * 2 * _VALUE_DTYPE.itemsize
    if len(payload) != expected:
        raise ValueError(f"flow file of {width}x{height} should hold {expected} bytes, found {len(payload)}")
    pairs = np.frombuffer(payload, dtype=_VALUE_DTYPE, offset=_HEADER_SIZE)
    pairs = pairs.reshape(int(height), int(width), 2)
    return FlowField(pairs[..., 0].astype(np.float64), pairs[..., 1].astype(np.float64))


def write_flow_file(field: FlowField, file_pointer: str | Path | UPath):
    file_io.write_bytes_to_file(file_pointer, encode_flow(field))


def read_flow_file(file_pointer: str | Path | UPath) -> FlowField:
    """Read a flow file written by `write_flow_file`.

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: if the file is not a valid flow file
    """
    try:
        return decode_flow(file_io.load_bytes_from_file(file_pointer))
    except ValueError as error:
        raise ValueError(f"{file_pointer}: {error}") from error
