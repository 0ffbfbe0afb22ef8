"""Epoch and batch loop over clips"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from upath import UPath

from mexformer.dataset.clip_sample import ClipSample
from mexformer.io import file_io
from mexformer.model.config import ModelSpec
from mexformer.model.head import predicted_class
from mexformer.model.network import check_weights, predict, sample_loss
from mexformer.model.weights import ModelWeights
from mexformer.numerics import GradTape, NonFiniteError
from mexformer.training.config import TrainConfig
from mexformer.training.optimizer import OptimizerState, sgd_momentum_step
from mexformer.training.schedule import cosine_lr

logger = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    """Raised when training produces a non-finite loss or gradient."""


@dataclass(frozen=True)
class EpochRecord:
    """Summary of one epoch; ``step`` counts optimizer steps taken so far and ``lr`` is the last rate used."""

    epoch: int
    step: int
    lr: float
    loss: float
    train_accuracy: float


@dataclass
class TrainResult:
    weights: ModelWeights
    log: List[EpochRecord] = field(default_factory=list)

    def log_lines(self) -> List[str]:
        return [json.dumps(asdict(record)) for record in self.log]

    def write_log(self, file_pointer: str | Path | UPath):
        """Write the log as line-delimited JSON records."""
        lines = self.log_lines()
        file_io.write_string_to_file(file_pointer, "".join(line + "\n" for line in lines))


@dataclass(frozen=True)
class _SampleOutcome:
    loss: float
    prediction: int
    gradients: List[np.ndarray]


def shuffled_order(seed: int, epoch: int, count: int) -> np.ndarray:
    """Permutation of sample indices for one epoch, from a counter-based generator keyed by (seed, epoch)."""
    generator = np.random.Generator(np.random.Philox(key=[seed, epoch]))
    return generator.permutation(count)


def label_indices(samples: Sequence[ClipSample], class_names: Sequence[str]) -> List[int]:
    """Class index of every sample.

    Raises:
        ValueError: naming the first sample whose label is not one of ``class_names``
    """
    lookup = {name: index for index, name in enumerate(class_names)}
    indices = []
    for sample in samples:
        if sample.label not in lookup:
            raise ValueError(f"sample {sample.sample_id}: label {sample.label!r} not in {list(class_names)}")
        indices.append(lookup[sample.label])
    return indices


def train(
    weights: ModelWeights,
    samples: Sequence[ClipSample],
    config: TrainConfig,
    spec: ModelSpec,
    class_names: Sequence[str],
) -> TrainResult:
    """Fit ``weights`` to ``samples`` by minibatch SGD with momentum.

    Each epoch visits the samples in a seed-derived shuffled order. A batch's
    gradient is the sum of its per-sample gradients, added in sample order, divided
    by the number of samples in the batch. The learning rate follows a cosine schedule over all steps.

    Args:
        weights: initial weights, matching ``spec``
        samples: training clips
        config: optimisation settings
        spec: model architecture
        class_names: class of each output index

    Returns:
        final weights and one log record per epoch

    Raises:
        ValueError: for an empty sample list or an unknown label
        TrainingError: if a sample's loss or a batch's gradient is not finite
    """
    if len(samples) == 0:
        raise ValueError("cannot train on an empty sample list")
    check_weights(weights, spec)
    labels = label_indices(samples, class_names)
    names = list(weights)
    total_steps = config.total_steps(len(samples))
    state = OptimizerState.zeros(weights)
    result = TrainResult(weights=weights)
    step = 0
    lr = config.learning_rate

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        for epoch in range(config.epochs):
            order = shuffled_order(config.seed, epoch, len(samples))
            loss_sum, correct = 0.0, 0
            for start in range(0, len(samples), config.batch_size):
                batch = [int(index) for index in order[start : start + config.batch_size]]
                lr = cosine_lr(step, total_steps, config.learning_rate, config.min_learning_rate)
                outcomes = _batch_outcomes(
                    executor, config.workers, result.weights, names, samples, labels, batch, spec
                )
                gradients = _mean_gradients(names, outcomes)
                try:
                    updated, state = sgd_momentum_step(
                        result.weights,
                        gradients,
                        state,
                        lr,
                        config.momentum,
                        config.weight_decay,
                        max_grad_norm=config.max_grad_norm,
                    )
                except NonFiniteError as error:
                    batch_ids = [samples[index].sample_id for index in batch]
                    raise TrainingError(f"non-finite gradient in batch {batch_ids}: {error}") from error
                result.weights = updated
                loss_sum += sum(outcome.loss for outcome in outcomes)
                correct += sum(outcome.prediction == labels[index] for index, outcome in zip(batch, outcomes))
                step += 1
            record = EpochRecord(
                epoch=epoch + 1,
                step=step,
                lr=lr,
                loss=loss_sum / len(samples),
                train_accuracy=correct / len(samples),
            )
            result.log.append(record)
            logger.info(
                "epoch %d/%d: loss %.4f, train accuracy %.3f, lr %.2e",
                record.epoch,
                config.epochs,
                record.loss,
                record.train_accuracy,
                record.lr,
            )
    return result


def _batch_outcomes(executor, workers, weights, names, samples, labels, batch, spec) -> List[_SampleOutcome]:
    def run(index):
        return _sample_outcome(weights, names, samples[index], labels[index], spec)

    if workers > 1 and len(batch) > 1:
        return list(executor.map(run, batch))
    return [run(index) for index in batch]


def _sample_outcome(
    weights: ModelWeights, names: List[str], sample: ClipSample, label: int, spec: ModelSpec
) -> _SampleOutcome:
    tracked = weights.with_grad(names)
    try:
        with GradTape() as tape:
            loss, probabilities = sample_loss(sample.frames, label, tracked, spec)
    except NonFiniteError as error:
        raise TrainingError(f"non-finite loss on sample {sample.sample_id}: {error}") from error
    gradients = tape.gradient(loss, [tracked[name] for name in names])
    return _SampleOutcome(loss.item(), predicted_class(probabilities), gradients)


def _mean_gradients(names: List[str], outcomes: Sequence[_SampleOutcome]) -> Dict[str, np.ndarray]:
    means = {}
    for position, name in enumerate(names):
        summed = outcomes[0].gradients[position]
        for outcome in outcomes[1:]:
            summed = summed + outcome.gradients[position]
        means[name] = summed / len(outcomes)
    return means


def evaluate_accuracy(
    weights: ModelWeights, samples: Sequence[ClipSample], spec: ModelSpec, class_names: Sequence[str]
) -> Tuple[float, List[int]]:
    """Accuracy of ``weights`` on ``samples`` and the predicted class indices."""
    labels = label_indices(samples, class_names)
    predictions = [predict(sample.frames, weights, spec) for sample in samples]
    correct = sum(prediction == label for prediction, label in zip(predictions, labels))
    return correct / len(samples), predictions
