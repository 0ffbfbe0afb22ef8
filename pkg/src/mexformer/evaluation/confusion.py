"""Confusion matrices bound to class names"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from upath import UPath

from mexformer.io import file_io


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """C×C counts, rows indexed by true class and columns by predicted class.

    Attributes:
        counts: read-only int64 array
        class_names: name of each row/column, in index order
    """

    counts: np.ndarray
    class_names: Tuple[str, ...]

    def __post_init__(self):
        counts = np.array(self.counts)
        names = tuple(str(name) for name in self.class_names)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion matrix must be square, got shape {counts.shape}")
        if counts.shape[0] != len(names):
            raise ValueError(f"{len(names)} class names for a {counts.shape[0]}-class matrix")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate class names {names}")
        if not np.array_equal(counts, np.round(counts)) or (counts < 0).any():
            raise ValueError("confusion counts must be non-negative integers")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "class_names", names)

    @classmethod
    def zeros(cls, class_names: Sequence[str]) -> ConfusionMatrix:
        return cls(np.zeros((len(class_names), len(class_names)), dtype=np.int64), tuple(class_names))

    @classmethod
    def from_predictions(
        cls, truths: Sequence[int | str], predictions: Sequence[int | str], class_names: Sequence[str]
    ) -> ConfusionMatrix:
        """Count (true, predicted) pairs given as class indices or class names.

        Raises:
            ValueError: for mismatched lengths or a class outside ``class_names``
        """
        if len(truths) != len(predictions):
            raise ValueError(f"{len(truths)} true labels but {len(predictions)} predictions")
        counts = np.zeros((len(class_names), len(class_names)), dtype=np.int64)
        for truth, prediction in zip(truths, predictions):
            counts[_class_index(truth, class_names), _class_index(prediction, class_names)] += 1
        return cls(counts, tuple(class_names))

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        if self.class_names != other.class_names:
            raise ValueError(f"cannot pool matrices over {self.class_names} and {other.class_names}")
        return ConfusionMatrix(self.counts + other.counts, self.class_names)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.class_names == other.class_names and np.array_equal(self.counts, other.counts)

    def permuted(self, order: Sequence[int]) -> ConfusionMatrix:
        """Same matrix with classes relabelled: new class ``i`` is old class ``order[i]``."""
        order = list(order)
        return ConfusionMatrix(self.counts[np.ix_(order, order)], tuple(self.class_names[i] for i in order))

    def to_list(self):
        return self.counts.tolist()

    def to_dataframe(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.counts, index=list(self.class_names), columns=list(self.class_names))
        frame.index.name = "true"
        return frame

    def write_csv(self, file_pointer: str | Path | UPath):
        """Write the counts with a class-name header row and first column."""
        file_io.write_dataframe_to_csv(self.to_dataframe(), file_pointer)

    @classmethod
    def read_csv(cls, file_pointer: str | Path | UPath) -> ConfusionMatrix:
        frame = file_io.load_csv_to_pandas(file_pointer, index_col=0)
        return cls(frame.to_numpy(), tuple(str(name) for name in frame.columns))


def _class_index(value: int | str, class_names: Sequence[str]) -> int:
    if isinstance(value, str):
        if value not in class_names:
            raise ValueError(f"class {value!r} not in {list(class_names)}")
        return list(class_names).index(value)
    index = int(value)
    if not 0 <= index < len(class_names):
        raise ValueError(f"class index {index} outside [0, {len(class_names)})")
    return index
