"""JSON and CSV output of evaluation results"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from upath import UPath

from mexformer.evaluation.confusion import ConfusionMatrix
from mexformer.evaluation.metrics import summarize
from mexformer.evaluation.protocol import ProtocolReport
from mexformer.io import file_io

PREDICTION_COLUMNS = ("true", "predicted")


def report_to_dict(report: ProtocolReport) -> dict:
    """JSON-ready form of a protocol report.

    Pooled metrics are the headline; fold-averaged and per-corpus metrics are given
    alongside.
    """
    pooled = report.pooled
    result = {
        "protocol": report.protocol.kind.value,
        "label_set": list(report.class_names),
        "headline": "pooled",
        "folds": [
            {
                "subject": fold.subject,
                "samples": fold.confusion.total,
                "confusion": fold.confusion.to_list(),
                "accuracy": summarize(fold.confusion)["accuracy"],
            }
            for fold in report.folds
        ],
        "pooled": summarize(pooled),
        "fold_average": report.fold_averaged(),
        "per_dataset": {dataset: summarize(cm) for dataset, cm in report.per_dataset().items()},
        "excluded": list(report.excluded),
    }
    flagged = result["pooled"].get("degenerate_classes")
    if flagged:
        warnings.warn(f"classes never seen in truth or predictions score F1 = 0: {flagged}")
    return result


def write_report(report: ProtocolReport, file_pointer: str | Path | UPath) -> dict:
    """Write the JSON report and return its content."""
    content = report_to_dict(report)
    file_io.write_string_to_file(file_pointer, json.dumps(content, indent=2) + "\n")
    return content


def write_predictions(report: ProtocolReport, file_pointer: str | Path | UPath):
    """Per-sample predictions as CSV (sample_id, dataset, subject, true, predicted)."""
    file_io.write_dataframe_to_csv(pd.DataFrame(report.predictions()), file_pointer, index=False)


def load_predictions(
    file_pointer: str | Path | UPath, class_names: Optional[Sequence[str]] = None
) -> ConfusionMatrix:
    """Confusion matrix of a prediction CSV with ``true`` and ``predicted`` columns.

    Args:
        file_pointer: CSV file
        class_names: class order; by default the sorted union of all values

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: for missing columns or values outside ``class_names``
    """
    frame = file_io.load_csv_to_pandas(file_pointer, dtype=str, keep_default_na=False)
    missing = [column for column in PREDICTION_COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"{file_pointer}: missing prediction columns {missing}")
    truths = frame["true"].str.strip().tolist()
    predictions = frame["predicted"].str.strip().tolist()
    if class_names is None:
        class_names = sorted(set(truths) | set(predictions))
    if len(class_names) < 2:
        raise ValueError(f"{file_pointer}: need at least two classes, got {list(class_names)}")
    try:
        return ConfusionMatrix.from_predictions(truths, predictions, list(class_names))
    except ValueError as error:
        raise ValueError(f"{file_pointer}: {error}") from error


def metrics_report(cm: ConfusionMatrix) -> dict:
    """JSON-ready scores of a single confusion matrix."""
    return {"label_set": list(cm.class_names), **summarize(cm)}
