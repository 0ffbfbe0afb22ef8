"""Emotion label sets of the sole-database and composite-database protocols.

The composite protocol merges every corpus into three classes::

    positive  <- happiness
    surprise  <- surprise
    negative  <- disgust, repression, anger, contempt, fear, sadness, and SMIC "negative"
    excluded  <- others / other

Sole-database evaluation keeps each corpus's own classes, dropping the rare ones:

    SMIC-HS   negative, positive, surprise
    CASME2    Happiness, Disgust, Surprise, Repression, Others
    SAMM      Anger, Happiness, Other, Surprise, Contempt  (its five most frequent)
"""

from __future__ import annotations

from enum import Enum
from typing import Dict, Optional, Tuple

from mexformer.dataset.sample_record import DatasetName


class ProtocolKind(str, Enum):
    """Evaluation protocol"""

    SDE = "sde"
    """sole-database evaluation, per-corpus labels"""

    CDE = "cde"
    """composite-database evaluation, three merged classes"""


CDE_CLASSES: Tuple[str, ...] = ("negative", "positive", "surprise")

CDE_LABEL_TABLE: Dict[str, Dict[str, Optional[str]]] = {
    DatasetName.SMIC_HS.value: {
        "negative": "negative",
        "positive": "positive",
        "surprise": "surprise",
    },
    DatasetName.CASME2.value: {
        "happiness": "positive",
        "surprise": "surprise",
        "disgust": "negative",
        "repression": "negative",
        "fear": "negative",
        "sadness": "negative",
        "others": None,
    },
    DatasetName.SAMM.value: {
        "happiness": "positive",
        "surprise": "surprise",
        "anger": "negative",
        "contempt": "negative",
        "disgust": "negative",
        "fear": "negative",
        "sadness": "negative",
        "other": None,
    },
}

SDE_CLASSES: Dict[str, Tuple[str, ...]] = {
    DatasetName.SMIC_HS.value: ("negative", "positive", "surprise"),
    DatasetName.CASME2.value: ("Happiness", "Disgust", "Surprise", "Repression", "Others"),
    DatasetName.SAMM.value: ("Anger", "Happiness", "Other", "Surprise", "Contempt"),
}

SDE_EXCLUDED: Dict[str, Tuple[str, ...]] = {
    DatasetName.SMIC_HS.value: (),
    DatasetName.CASME2.value: ("Fear", "Sadness"),
    DatasetName.SAMM.value: ("Disgust", "Fear", "Sadness"),
}


def _dataset_key(dataset: str) -> str:
    return DatasetName(dataset).value


def cde_label_map(dataset: str, label: str) -> Optional[str]:
    """Composite class of a corpus label, or None when the label is excluded.

    Raises:
        ValueError: for a corpus without a composite mapping or an unknown label
    """
    table = CDE_LABEL_TABLE.get(_dataset_key(dataset))
    if table is None:
        raise ValueError(
            f"dataset {dataset} has no composite label mapping; "
            "score it with the sole-database protocol (protocol=sde)"
        )
    key = label.strip().lower()
    if key not in table:
        raise ValueError(f"unknown {dataset} label {label!r}; expected one of {sorted(table)}")
    return table[key]


def sde_label(dataset: str, label: str) -> Optional[str]:
    """Canonical sole-database class of a label, or None for a known rare class.

    Raises:
        ValueError: for a corpus without a fixed label set or an unknown label
    """
    dataset = _dataset_key(dataset)
    if dataset not in SDE_CLASSES:
        raise ValueError(f"dataset {dataset} has no fixed sole-database label set")
    key = label.strip().lower()
    for name in SDE_CLASSES[dataset]:
        if name.lower() == key:
            return name
    if key in (name.lower() for name in SDE_EXCLUDED[dataset]):
        return None
    raise ValueError(f"unknown {dataset} label {label!r}; expected one of {list(SDE_CLASSES[dataset])}")
