"""Read and write helpers over local or fsspec-backed paths"""

from __future__ import annotations

from pathlib import Path
from typing import List

import pandas as pd
from upath import UPath

from mexformer.io.file_io.file_pointer import get_upath


def make_directory(file_pointer: str | Path | UPath, exist_ok: bool = False):
    """Create a directory and any missing parents.

    Raises:
        OSError: if the directory exists and ``exist_ok`` is False
    """
    file_pointer = get_upath(file_pointer)
    file_pointer.mkdir(parents=True, exist_ok=exist_ok)


def write_string_to_file(file_pointer: str | Path | UPath, string: str, encoding: str = "utf-8"):
    file_pointer = get_upath(file_pointer)
    with file_pointer.open("w", encoding=encoding) as _file:
        _file.write(string)


def load_text_file(file_pointer: str | Path | UPath, encoding: str = "utf-8") -> List[str]:
    """Lines of a text file, newlines kept."""
    file_pointer = get_upath(file_pointer)
    with file_pointer.open("r", encoding=encoding) as _text_file:
        return _text_file.readlines()


def write_bytes_to_file(file_pointer: str | Path | UPath, payload: bytes):
    """Write raw bytes to a file, replacing any existing content."""
    file_pointer = get_upath(file_pointer)
    with file_pointer.open("wb") as _file:
        _file.write(payload)


def load_bytes_from_file(file_pointer: str | Path | UPath) -> bytes:
    """Read the full content of a binary file.

    Raises:
        FileNotFoundError: if nothing exists at the pointer
    """
    file_pointer = get_upath(file_pointer)
    if file_pointer is None or not file_pointer.exists():
        raise FileNotFoundError(f"No file found at {file_pointer}")
    with file_pointer.open("rb") as _file:
        return _file.read()


def load_csv_to_pandas(file_pointer: str | Path | UPath, encoding: str = "utf-8", **kwargs) -> pd.DataFrame:
    """Parse a CSV file.

    Args:
        file_pointer: location of the CSV file
        encoding: text encoding of the file
        **kwargs: passed to ``pandas.read_csv``
    """
    file_pointer = get_upath(file_pointer)
    with file_pointer.open("r", encoding=encoding) as csv_file:
        return pd.read_csv(csv_file, **kwargs)


def write_dataframe_to_csv(dataframe: pd.DataFrame, file_pointer: str | Path | UPath, **kwargs):
    """Render ``dataframe`` with ``DataFrame.to_csv(**kwargs)`` and write it out."""
    write_string_to_file(file_pointer, dataframe.to_csv(**kwargs))
