"""Classification head and cross-entropy objective"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from mexformer.numerics import ShapeError, Tensor, add, gelu, linear, log, scale, softmax, take

CROSS_ENTROPY_EPS = 1e-12


def classify(feature: Tensor, weights: Mapping[str, Tensor]) -> Tensor:
    """Class probabilities softmax(FC2(GELU(FC1(feature)))) for a 1×D clip feature.

    Args:
        feature: 1×D row
        weights: ``head`` scope with ``fc1.{weight,bias}`` (D×D_h) and ``fc2.{weight,bias}``
            (D_h×C)

    Returns:
        1×C probability row
    """
    return softmax(logits(feature, weights), axis=-1)


def logits(feature: Tensor, weights: Mapping[str, Tensor]) -> Tensor:
    hidden = gelu(linear(feature, weights["fc1.weight"], weights["fc1.bias"]))
    return linear(hidden, weights["fc2.weight"], weights["fc2.bias"])


def cross_entropy(
    probabilities: Tensor | Sequence[Tensor],
    labels: Sequence[int],
    eps: float = CROSS_ENTROPY_EPS,
) -> Tensor:
    """Mean negative log-likelihood of the true classes, L = −(1/N)·Σᵢ log pᵢ,yᵢ.

    Probabilities at the true class are clamped to ``eps`` before the logarithm.

    Args:
        probabilities: N×C tensor, or a list of N 1×C rows
        labels: N class indices

    Raises:
        ShapeError: if the number of labels differs from the number of rows
        ValueError: for a label outside ``[0, C)``
    """
    rows = list(probabilities) if not isinstance(probabilities, Tensor) else None
    count = len(rows) if rows is not None else probabilities.shape[0]
    if len(labels) != count:
        raise ShapeError(f"cross_entropy: {len(labels)} labels for {count} predictions")
    if count == 0:
        raise ValueError("cross_entropy: empty batch")
    terms = []
    for row, label in enumerate(labels):
        source = rows[row] if rows is not None else probabilities
        index = (0, int(label)) if rows is not None else (row, int(label))
        classes = source.shape[1]
        if not 0 <= int(label) < classes:
            raise ValueError(f"label {label} outside [0, {classes})")
        terms.append(log(take(source, index), eps=eps))
    summed = terms[0]
    for term in terms[1:]:
        summed = add(summed, term)
    return scale(summed, -1.0 / count)


def predicted_class(probabilities: Tensor) -> int:
    """Index of the most probable class of a 1×C row; ties go to the lowest index."""
    return int(np.argmax(probabilities.data.reshape(-1)))
