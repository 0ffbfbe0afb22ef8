"""Leave-one-subject-out evaluation under the sole- and composite-database protocols"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Generic, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from mexformer.dataset.clip_sample import ClipSample
from mexformer.dataset.sample_record import DatasetName
from mexformer.evaluation.confusion import ConfusionMatrix
from mexformer.evaluation.labels import CDE_CLASSES, SDE_CLASSES, ProtocolKind, cde_label_map, sde_label
from mexformer.evaluation.metrics import summarize
from mexformer.model.config import ModelSpec
from mexformer.model.network import init_weights, predict
from mexformer.model.weights import ModelWeights
from mexformer.training.config import TrainConfig
from mexformer.training.trainer import train

logger = logging.getLogger(__name__)

Item = TypeVar("Item")

FoldRunner = Callable[[int, Sequence[ClipSample], Sequence[ClipSample], Sequence[str]], List[int]]
"""(fold index, training clips, test clips, class names) -> predicted class index per test clip"""


class ProtocolSpec(BaseModel):
    """Which samples are evaluated and which classes they are scored over.

    Attributes:
        kind: ``sde`` keeps each corpus's own labels; ``cde`` maps every corpus to
            negative / positive / surprise
        datasets: only samples of these corpora are evaluated; None keeps all
        label_set: explicit class list that replaces the label mapping; labels
            outside it are an error
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ProtocolKind = ProtocolKind.CDE
    datasets: Optional[List[str]] = None
    label_set: Optional[List[str]] = Field(default=None, min_length=2)

    def map_label(self, dataset: str, label: str) -> Optional[str]:
        """Protocol class of one sample label; None when the sample is excluded.

        Raises:
            ValueError: for labels the protocol cannot place
        """
        if self.label_set is not None:
            if label not in self.label_set:
                raise ValueError(f"label {label!r} not in the protocol label set {self.label_set}")
            return label
        if self.kind == ProtocolKind.CDE:
            return cde_label_map(dataset, label)
        if DatasetName(dataset).value not in SDE_CLASSES:
            return label
        return sde_label(dataset, label)

    def class_names(self, datasets: Sequence[str], labels: Sequence[str] = ()) -> List[str]:
        """Ordered classes of the protocol for the given corpora.

        A single corpus without a fixed label set (synthetic data) is scored over its
        sorted distinct ``labels``.

        Raises:
            ValueError: if the corpora do not share a label set
        """
        if self.label_set is not None:
            return list(self.label_set)
        if self.kind == ProtocolKind.CDE:
            return list(CDE_CLASSES)
        sets = {SDE_CLASSES.get(DatasetName(dataset).value) for dataset in datasets}
        if sets == {None} and len(datasets) == 1:
            return sorted(set(labels))
        if len(sets) != 1 or None in sets:
            raise ValueError(
                f"sole-database evaluation needs one corpus with a fixed label set, got {sorted(datasets)}; "
                "choose one dataset or give an explicit label set"
            )
        return list(sets.pop())


@dataclass(frozen=True)
class Fold(Generic[Item]):
    """One held-out subject and the samples of everyone else."""

    subject: str
    train: List[Item]
    test: List[Item]


@dataclass(frozen=True)
class FoldResult:
    """Predictions for the samples of one held-out subject."""

    subject: str
    sample_ids: List[str]
    datasets: List[str]
    truths: List[int]
    predictions: List[int]
    confusion: ConfusionMatrix


@dataclass
class ProtocolReport:
    """Per-fold results and the metrics pooled over all folds."""

    protocol: ProtocolSpec
    class_names: List[str]
    folds: List[FoldResult]
    excluded: List[str] = field(default_factory=list)

    @property
    def pooled(self) -> ConfusionMatrix:
        """Sum of the fold matrices."""
        total = ConfusionMatrix.zeros(self.class_names)
        for fold in self.folds:
            total = total + fold.confusion
        return total

    def fold_averaged(self) -> Dict[str, float]:
        """Unweighted mean over folds of each fold's scores."""
        summaries = [summarize(fold.confusion) for fold in self.folds]
        return {
            key: float(np.mean([summary[key] for summary in summaries])) for key in ("accuracy", "uf1", "uar")
        }

    def per_dataset(self) -> Dict[str, ConfusionMatrix]:
        """Pooled matrix restricted to the samples of each corpus."""
        pairs: Dict[str, Tuple[List[int], List[int]]] = {}
        for fold in self.folds:
            for dataset, truth, prediction in zip(fold.datasets, fold.truths, fold.predictions):
                truths, predictions = pairs.setdefault(dataset, ([], []))
                truths.append(truth)
                predictions.append(prediction)
        return {
            dataset: ConfusionMatrix.from_predictions(truths, predictions, self.class_names)
            for dataset, (truths, predictions) in sorted(pairs.items())
        }

    def predictions(self) -> List[Dict[str, str]]:
        """One row per evaluated sample: sample id, corpus, subject, true and predicted class."""
        rows = []
        for fold in self.folds:
            for sample_id, dataset, truth, prediction in zip(
                fold.sample_ids, fold.datasets, fold.truths, fold.predictions
            ):
                rows.append(
                    {
                        "sample_id": sample_id,
                        "dataset": dataset,
                        "subject": fold.subject,
                        "true": self.class_names[truth],
                        "predicted": self.class_names[prediction],
                    }
                )
        return rows


def subject_key(item) -> str:
    """``<dataset>/<subject_id>`` of a record or clip."""
    return f"{item.dataset}/{item.subject_id}"


def loso_splits(samples: Sequence[Item]) -> List[Fold[Item]]:
    """One fold per distinct subject, ordered by subject key.

    Each fold tests on every sample of its subject and trains on all other samples,
    both in input order.

    Raises:
        ValueError: for an empty sample list, or a fold with no training samples
    """
    if len(samples) == 0:
        raise ValueError("cannot split an empty sample list")
    subjects = sorted({subject_key(sample) for sample in samples})
    folds = []
    for subject in subjects:
        test = [sample for sample in samples if subject_key(sample) == subject]
        train_part = [sample for sample in samples if subject_key(sample) != subject]
        if not train_part:
            raise ValueError(f"untrainable fold: holding out subject {subject} leaves no training samples")
        folds.append(Fold(subject, train_part, test))
    return folds


def apply_protocol(
    samples: Sequence[ClipSample], protocol: ProtocolSpec
) -> Tuple[List[ClipSample], List[str], List[str]]:
    """Filter samples by corpus and relabel them into the protocol's classes.

    Samples whose label the protocol excludes (composite "others", rare sole-database
    classes) are dropped with a warning.

    Returns:
        (retained clips with protocol labels, class names, excluded sample ids)

    Raises:
        ValueError: for labels the protocol cannot place, or nothing left to evaluate
    """
    wanted = None if protocol.datasets is None else {DatasetName(name).value for name in protocol.datasets}
    selected = [sample for sample in samples if wanted is None or sample.dataset in wanted]
    retained, excluded = [], []
    for sample in selected:
        try:
            label = protocol.map_label(sample.dataset, sample.label)
        except ValueError as error:
            raise ValueError(f"sample {sample.sample_id}: {error}") from error
        if label is None:
            excluded.append(sample.sample_id)
        else:
            retained.append(sample.with_label(label))
    if excluded:
        warnings.warn(f"{len(excluded)} samples excluded by the {protocol.kind.value} label mapping")
    if not retained:
        raise ValueError("no samples left to evaluate after applying the protocol")
    class_names = protocol.class_names(
        sorted({sample.dataset for sample in retained}), [sample.label for sample in retained]
    )
    return retained, class_names, excluded


def fold_seed(seed: int, fold_index: int) -> int:
    """Initialisation seed of one fold, derived from the training seed."""
    return int(np.random.SeedSequence([seed, fold_index]).generate_state(1)[0])


def training_fold_runner(
    spec: ModelSpec, config: TrainConfig, initial_weights: Optional[ModelWeights] = None
) -> FoldRunner:
    """Fold runner that trains a fresh model per fold and predicts the held-out clips.

    Every fold starts from ``initial_weights`` when given, otherwise from a random
    initialisation seeded by `fold_seed`.
    """

    def run(fold_index, train_samples, test_samples, class_names) -> List[int]:
        if initial_weights is not None:
            weights = initial_weights
        else:
            weights = init_weights(spec, seed=fold_seed(config.seed, fold_index))
        fold_config = config.model_copy(update={"seed": fold_seed(config.seed, fold_index)})
        result = train(weights, train_samples, fold_config, spec, class_names)
        return [predict(sample.frames, result.weights, spec) for sample in test_samples]

    return run


def run_protocol(
    samples: Sequence[ClipSample],
    protocol: ProtocolSpec,
    config: Optional[TrainConfig] = None,
    spec: Optional[ModelSpec] = None,
    runner: Optional[FoldRunner] = None,
    initial_weights: Optional[ModelWeights] = None,
    workers: int = 1,
) -> ProtocolReport:
    """Leave-one-subject-out cross-validation of a model under a protocol.

    Args:
        samples: model-ready clips with their original corpus labels
        protocol: label mapping and corpus filter
        config: training settings for every fold (with ``spec``, unless ``runner`` is given)
        spec: architecture; its class count must match the protocol
        runner: replaces training, e.g. with an oracle predictor
        initial_weights: starting weights for every fold
        workers: folds evaluated concurrently

    Raises:
        ValueError: for label mapping failures, untrainable folds, or a model whose
            class count differs from the protocol's
    """
    retained, class_names, excluded = apply_protocol(samples, protocol)
    if runner is None:
        if config is None or spec is None:
            raise ValueError("run_protocol needs a training config and model spec, or a fold runner")
        if spec.classes != len(class_names):
            raise ValueError(f"model has {spec.classes} classes but the protocol scores {len(class_names)}")
        runner = training_fold_runner(spec, config, initial_weights)
    folds = loso_splits(retained)
    logger.info(
        "%s protocol: %d samples, %d folds, classes %s",
        protocol.kind.value,
        len(retained),
        len(folds),
        class_names,
    )

    def evaluate(indexed_fold) -> FoldResult:
        fold_index, fold = indexed_fold
        predictions = [int(value) for value in runner(fold_index, fold.train, fold.test, class_names)]
        if len(predictions) != len(fold.test):
            raise ValueError(
                f"fold {fold.subject}: {len(predictions)} predictions for {len(fold.test)} samples"
            )
        truths = [class_names.index(sample.label) for sample in fold.test]
        result = FoldResult(
            subject=fold.subject,
            sample_ids=[sample.sample_id for sample in fold.test],
            datasets=[sample.dataset for sample in fold.test],
            truths=truths,
            predictions=predictions,
            confusion=ConfusionMatrix.from_predictions(truths, predictions, class_names),
        )
        correct = sum(truth == prediction for truth, prediction in zip(truths, predictions))
        logger.info(
            "fold %d/%d (%s): %d of %d correct",
            fold_index + 1,
            len(folds),
            fold.subject,
            correct,
            len(truths),
        )
        return result

    if workers > 1 and len(folds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(evaluate, enumerate(folds)))
    else:
        results = [evaluate(indexed) for indexed in enumerate(folds)]
    return ProtocolReport(protocol=protocol, class_names=class_names, folds=results, excluded=excluded)
