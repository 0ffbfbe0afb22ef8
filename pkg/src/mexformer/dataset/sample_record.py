from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self


class DatasetName(str, Enum):
    """Source corpora a sample can come from"""

    SMIC_HS = "SMIC-HS"
    CASME2 = "CASME2"
    SAMM = "SAMM"
    SYNTH = "SYNTH"

    @classmethod
    def all_names(cls):
        """Fetch a list of all dataset names"""
        return [name.value for name in cls]


_DATASET_ALIASES = {
    "smic": DatasetName.SMIC_HS,
    "smic-hs": DatasetName.SMIC_HS,
    "smic_hs": DatasetName.SMIC_HS,
    "casme2": DatasetName.CASME2,
    "casme ii": DatasetName.CASME2,
    "casmeii": DatasetName.CASME2,
    "casme_ii": DatasetName.CASME2,
    "samm": DatasetName.SAMM,
    "synth": DatasetName.SYNTH,
}


class SampleRecord(BaseModel):
    """One micro-expression clip of a manifest.

    Frame and landmark directories are kept as written in the manifest; relative
    locations are resolved against the manifest's directory by `Manifest`.
    """

    sample_id: str = Field(min_length=1)
    dataset: DatasetName
    subject_id: str = Field(min_length=1)
    frames_dir: str = Field(min_length=1)
    onset: int = Field(ge=0)
    apex: Optional[int] = None
    """Peak frame index; None when the corpus does not annotate it."""

    offset: int = Field(ge=0)
    label: str = Field(min_length=1)
    landmarks_dir: Optional[str] = None

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=True)

    @field_validator("dataset", mode="before")
    @classmethod
    def dataset_alias(cls, value):
        """Accept common spellings of the corpus names."""
        if isinstance(value, str):
            return _DATASET_ALIASES.get(value.strip().lower(), value)
        return value

    @field_validator("apex", "landmarks_dir", mode="before")
    @classmethod
    def empty_as_none(cls, value):
        """Treat empty manifest cells as missing."""
        if isinstance(value, str) and value.strip() == "":
            return None
        return value

    @model_validator(mode="after")
    def check_frame_order(self) -> Self:
        """Check that onset <= apex <= offset."""
        apex = self.apex if self.apex is not None else self.onset
        if not self.onset <= apex <= self.offset or self.onset > self.offset:
            raise ValueError(
                f"frame indices of sample {self.sample_id} must satisfy onset <= apex <= offset, "
                f"got onset={self.onset}, apex={self.apex}, offset={self.offset}"
            )
        return self

    @property
    def subject_key(self) -> str:
        """Subject identity across corpora, ``<dataset>/<subject_id>``."""
        return f"{self.dataset}/{self.subject_id}"

    @property
    def frame_count(self) -> int:
        return self.offset - self.onset + 1

    @property
    def resolved_apex(self) -> int:
        """The annotated apex, or the middle frame when none is annotated."""
        if self.apex is not None:
            return self.apex
        return (self.onset + self.offset) // 2
