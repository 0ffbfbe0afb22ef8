"""Recognition metrics computed from confusion matrices"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from mexformer.evaluation.confusion import ConfusionMatrix


def per_class_f1(cm: ConfusionMatrix) -> np.ndarray:
    """F1 of every class, 2TP / (2TP + FP + FN); 0 for a class with TP + FP + FN = 0."""
    counts = cm.counts.astype(np.float64)
    true_positive = np.diag(counts)
    false_positive = counts.sum(axis=0) - true_positive
    false_negative = counts.sum(axis=1) - true_positive
    denominator = 2 * true_positive + false_positive + false_negative
    return np.divide(2 * true_positive, denominator, out=np.zeros_like(denominator), where=denominator > 0)


def per_class_recall(cm: ConfusionMatrix) -> np.ndarray:
    """Recall TP / N of every class; 0 for a class absent from the true labels."""
    counts = cm.counts.astype(np.float64)
    support = counts.sum(axis=1)
    return np.divide(np.diag(counts), support, out=np.zeros_like(support), where=support > 0)


def uf1(cm: ConfusionMatrix) -> float:
    """Unweighted F1: the mean of the per-class F1 scores."""
    return float(per_class_f1(cm).mean())


def uar(cm: ConfusionMatrix) -> float:
    """Unweighted average recall: the mean of the per-class recalls."""
    return float(per_class_recall(cm).mean())


def accuracy(cm: ConfusionMatrix) -> float:
    """Fraction of samples on the diagonal.

    Raises:
        ValueError: for an empty matrix
    """
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return float(np.trace(cm.counts) / cm.total)


def accuracy_and_macro_f1(cm: ConfusionMatrix) -> Tuple[float, float]:
    return accuracy(cm), uf1(cm)


def degenerate_classes(cm: ConfusionMatrix) -> List[str]:
    """Classes that never occur as truth or prediction; they score F1 = 0."""
    counts = cm.counts
    involved = counts.sum(axis=0) + counts.sum(axis=1)
    return [name for name, seen in zip(cm.class_names, involved) if seen == 0]


def absent_classes(cm: ConfusionMatrix) -> List[str]:
    """Classes with no true samples; they score recall = 0."""
    return [name for name, support in zip(cm.class_names, cm.counts.sum(axis=1)) if support == 0]


def summarize(cm: ConfusionMatrix) -> dict:
    """All scores of one matrix, with the class flags, as a JSON-ready dictionary."""
    summary = {
        "confusion": cm.to_list(),
        "samples": cm.total,
        "accuracy": accuracy(cm) if cm.total else None,
        "macro_f1": uf1(cm),
        "uf1": uf1(cm),
        "uar": uar(cm),
    }
    degenerate = degenerate_classes(cm)
    absent = absent_classes(cm)
    if degenerate:
        summary["degenerate_classes"] = degenerate
    if absent:
        summary["absent_classes"] = absent
    return summary
