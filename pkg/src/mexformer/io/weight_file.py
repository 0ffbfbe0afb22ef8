"""Named-tensor weight container files.

Layout (all integers little-endian)::

    b"SLST" | u32 version (=1) | u32 tensor count
    per tensor:
        u16 name length | UTF-8 name | u8 dtype (0 = float32, 1 = float64) | u8 rank
        | rank * u64 dims | row-major little-endian payload

Tensors are stored in container order, so save -> load -> save is byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping

import numpy as np
from upath import UPath

from mexformer.io import file_io
from mexformer.model.weights import ModelWeights
from mexformer.numerics import Tensor

WEIGHT_MAGIC = b"SLST"
WEIGHT_FORMAT_VERSION = 1

_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_CODE_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


def encode_weights(arrays: Mapping[str, np.ndarray]) -> bytes:
    """Serialise named arrays in iteration order.

    Raises:
        ValueError: for unsupported dtypes or names longer than 65535 UTF-8 bytes
    """
    chunks = [
        WEIGHT_MAGIC,
        np.array([WEIGHT_FORMAT_VERSION, len(arrays)], dtype="<u4").tobytes(),
    ]
    for name, array in arrays.items():
        array = array.data if isinstance(array, Tensor) else np.asarray(array)
        code = _DTYPE_CODES.get(array.dtype)
        if code is None:
            raise ValueError(f"tensor {name!r} has unsupported dtype {array.dtype}")
        encoded_name = name.encode("utf-8")
        if len(encoded_name) > np.iinfo(np.uint16).max:
            raise ValueError(f"tensor name too long: {name[:40]}...")
        chunks.append(np.array([len(encoded_name)], dtype="<u2").tobytes())
        chunks.append(encoded_name)
        chunks.append(np.array([code, array.ndim], dtype="u1").tobytes())
        chunks.append(np.array(array.shape, dtype="<u8").tobytes())
        chunks.append(np.ascontiguousarray(array, dtype=_CODE_DTYPES[code]).tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.offset = 0

    def take(self, dtype, count: int = 1) -> np.ndarray:
        dtype = np.dtype(dtype)
        size = dtype.itemsize * count
        if self.offset + size > len(self.payload):
            raise ValueError("weight file truncated")
        values = np.frombuffer(self.payload, dtype=dtype, count=count, offset=self.offset)
        self.offset += size
        return values

    def take_bytes(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise ValueError("weight file truncated")
        chunk = self.payload[self.offset : self.offset + size]
        self.offset += size
        return chunk


def decode_weights(payload: bytes) -> Dict[str, np.ndarray]:
    """Parse a weight container into an ordered name → array dictionary.

    Raises:
        ValueError: for a bad magic number, unknown version or dtype code, duplicate
            names, truncated or trailing data
    """
    reader = _Reader(payload)
    if reader.take_bytes(len(WEIGHT_MAGIC)) != WEIGHT_MAGIC:
        raise ValueError("not a weight file (bad magic number)")
    version, count = (int(value) for value in reader.take("<u4", 2))
    if version != WEIGHT_FORMAT_VERSION:
        raise ValueError(f"unsupported weight file version {version}")
    arrays: Dict[str, np.ndarray] = {}
    for _ in range(count):
        name_length = int(reader.take("<u2")[0])
        name = reader.take_bytes(name_length).decode("utf-8")
        code, rank = (int(value) for value in reader.take("u1", 2))
        if code not in _CODE_DTYPES:
            raise ValueError(f"tensor {name!r} has unknown dtype code {code}")
        shape = tuple(int(value) for value in reader.take("<u8", rank))
        values = reader.take(_CODE_DTYPES[code], int(np.prod(shape, dtype=np.int64)))
        if name in arrays:
            raise ValueError(f"duplicate tensor name {name!r}")
        arrays[name] = values.reshape(shape).astype(_CODE_DTYPES[code].newbyteorder("="))
    if reader.offset != len(payload):
        raise ValueError(f"{len(payload) - reader.offset} unexpected trailing bytes in weight file")
    return arrays


def save_weights(weights: Mapping[str, np.ndarray], file_pointer: str | Path | UPath):
    """Write a weight container (a `ModelWeights` or any mapping of names to arrays)."""
    file_io.write_bytes_to_file(file_pointer, encode_weights(weights))


def load_weights(file_pointer: str | Path | UPath) -> ModelWeights:
    """Read a weight container written by `save_weights`.

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: if the file is malformed
    """
    try:
        arrays = decode_weights(file_io.load_bytes_from_file(file_pointer))
    except ValueError as error:
        raise ValueError(f"{file_pointer}: {error}") from error
    return ModelWeights(arrays)
