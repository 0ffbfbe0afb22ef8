"""Container class for the clips of one or more micro-expression corpora"""

from __future__ import annotations

import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterator, List, Sequence

import pandas as pd
from pydantic import ValidationError
from upath import UPath

from mexformer.dataset.sample_record import SampleRecord
from mexformer.io import file_io, paths
from mexformer.io.images import read_image_size

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ["sample_id", "dataset", "subject_id", "frames_dir", "onset", "apex", "offset", "label"]
OPTIONAL_COLUMNS = ["landmarks_dir"]


class ManifestError(ValueError):
    """Raised when a manifest is malformed or refers to missing files."""


class Manifest:
    """Ordered sample records, plus the directory relative paths resolve against."""

    def __init__(self, records: Sequence[SampleRecord], base_dir: str | Path | UPath | None = None) -> None:
        duplicates = sorted(key for key, count in Counter(r.sample_id for r in records).items() if count > 1)
        if duplicates:
            raise ManifestError(f"duplicate sample_id values: {duplicates}")
        self.records: List[SampleRecord] = list(records)
        self.base_dir = file_io.get_upath(base_dir) if base_dir else None
        self._by_id = {record.sample_id: record for record in self.records}

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SampleRecord]:
        return iter(self.records)

    def __getitem__(self, sample_id: str) -> SampleRecord:
        return self._by_id[sample_id]

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._by_id

    @property
    def datasets(self) -> List[str]:
        """Source datasets present, in order of first appearance."""
        return list(dict.fromkeys(record.dataset for record in self.records))

    @property
    def subject_keys(self) -> List[str]:
        return sorted({record.subject_key for record in self.records})

    def mean_frame_count(self, dataset: str) -> float:
        """Mean onset-to-offset frame count of a dataset's clips."""
        counts = [record.frame_count for record in self.records if record.dataset == dataset]
        if not counts:
            raise ValueError(f"manifest holds no samples of dataset {dataset}")
        return sum(counts) / len(counts)

    def mean_frame_counts(self) -> Dict[str, float]:
        return {dataset: self.mean_frame_count(dataset) for dataset in self.datasets}

    def subset(self, sample_ids: Sequence[str]) -> Manifest:
        return Manifest([self[sample_id] for sample_id in sample_ids], self.base_dir)

    def resolve(self, location: str) -> UPath:
        """Resolve a directory named in the manifest against the manifest's directory."""
        if self.base_dir is None:
            return file_io.get_upath(location)
        return self.base_dir / location

    def frames_path(self, record: SampleRecord) -> UPath:
        return self.resolve(record.frames_dir)

    def landmarks_path(self, record: SampleRecord) -> UPath | None:
        if record.landmarks_dir is None:
            return None
        return self.resolve(record.landmarks_dir)

    def frame_files(self, record: SampleRecord) -> List[UPath]:
        """Frame files for indices onset … offset."""
        frames_dir = self.frames_path(record)
        return [paths.frame_file(frames_dir, index) for index in range(record.onset, record.offset + 1)]

    def landmark_files(self, record: SampleRecord) -> List[UPath] | None:
        landmarks_dir = self.landmarks_path(record)
        if landmarks_dir is None:
            return None
        return [paths.landmark_file(landmarks_dir, index) for index in range(record.onset, record.offset + 1)]

    def check_files(self):
        """Check that every frame and landmark file exists and each clip's frames share a size.

        Raises:
            ManifestError: naming the sample and the offending file
        """
        for record in self.records:
            sizes = set()
            for frame_file in self.frame_files(record):
                if not file_io.does_file_or_directory_exist(frame_file):
                    raise ManifestError(f"sample {record.sample_id}: missing frame file {frame_file}")
                sizes.add(read_image_size(frame_file))
            if len(sizes) > 1:
                raise ManifestError(f"sample {record.sample_id}: frames have different sizes {sorted(sizes)}")
            for landmark_file in self.landmark_files(record) or []:
                if not file_io.does_file_or_directory_exist(landmark_file):
                    raise ManifestError(f"sample {record.sample_id}: missing landmark file {landmark_file}")

    def as_dataframe(self) -> pd.DataFrame:
        """One row per record, in manifest column order."""
        columns = REQUIRED_COLUMNS + OPTIONAL_COLUMNS
        rows = [
            {column: "" if value is None else str(value) for column, value in record.model_dump().items()}
            for record in self.records
        ]
        return pd.DataFrame(rows, columns=columns)

    def write_to_file(self, manifest_file: str | Path | UPath):
        """Write the manifest as CSV (header row, UTF-8, comma-separated)."""
        file_io.write_dataframe_to_csv(self.as_dataframe(), manifest_file, index=False)

    @classmethod
    def read_from_file(cls, manifest_file: str | Path | UPath, check_files: bool = True) -> Manifest:
        """Read and validate a manifest CSV.

        Args:
            manifest_file: path to the CSV
            check_files: also verify the frame and landmark files the rows refer to

        Raises:
            FileNotFoundError: if the manifest does not exist
            ManifestError: for missing columns, invalid rows, duplicate sample ids or
                missing frame files
        """
        manifest_file = file_io.get_upath(manifest_file)
        if not file_io.does_file_or_directory_exist(manifest_file):
            raise FileNotFoundError(f"No manifest found at {manifest_file}")
        frame = file_io.load_csv_to_pandas(manifest_file, dtype=str, keep_default_na=False)
        missing = [column for column in REQUIRED_COLUMNS if column not in frame.columns]
        if missing:
            raise ManifestError(f"{manifest_file}: missing required columns {missing}")

        records = []
        for row_number, row in enumerate(frame.to_dict(orient="records"), start=2):
            values = {
                column: row[column].strip() for column in REQUIRED_COLUMNS + OPTIONAL_COLUMNS if column in row
            }
            name = values.get("sample_id") or f"at line {row_number}"
            try:
                records.append(SampleRecord(**values))
            except ValidationError as error:
                reasons = "; ".join(
                    f"{'.'.join(map(str, item['loc'])) or 'row'}: {item['msg']}" for item in error.errors()
                )
                raise ManifestError(f"{manifest_file}: sample {name}: {reasons}") from error

        manifest = cls(records, manifest_file.parent)
        if check_files:
            manifest.check_files()
        logger.info("loaded %d samples from %s", len(manifest), manifest_file)
        return manifest


def load_manifest(manifest_file: str | Path | UPath, check_files: bool = True) -> Manifest:
    """Read and validate a manifest CSV; see `Manifest.read_from_file`."""
    return Manifest.read_from_file(manifest_file, check_files=check_files)


def write_manifest(manifest: Manifest, manifest_file: str | Path | UPath):
    manifest.write_to_file(manifest_file)
