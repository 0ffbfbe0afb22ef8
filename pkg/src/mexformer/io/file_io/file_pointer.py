from __future__ import annotations

from pathlib import Path
from typing import List

from upath import UPath


def get_upath(path: str | Path | UPath) -> UPath:
    """Normalise a path-like to a ``UPath``.

    Args:
        path: local path string, ``pathlib.Path``, or fsspec URL or ``UPath``

    Returns:
        the same location as a ``UPath``, or None for an empty input
    """
    if not path:
        return None
    if isinstance(path, UPath):
        return path
    return UPath(path)


def does_file_or_directory_exist(pointer: str | Path | UPath) -> bool:
    """Whether anything exists at the location.

    Args:
        pointer: location of a file or directory

    Returns:
        True for an existing file or directory
    """
    pointer = get_upath(pointer)
    return pointer.exists()


def find_files_matching_path(pointer: str | Path | UPath, *paths: str) -> List[UPath]:
    """Find files or directories under a location that match glob parts.

    Args:
        pointer: base directory in which to search
        paths: directory names optionally followed by a file name; any part may use
            ``*`` wildcards, e.g. ``("*", "flow_*.slfl")``

    Returns:
        matching paths in sorted order; with no parts, a one-element list of ``pointer``
    """
    pointer = get_upath(pointer)
    if len(paths) == 0:
        return [pointer]
    return sorted(pointer.glob(pointer.fs.sep.join(paths)))
