"""Central finite differences, used to check tape gradients"""

from __future__ import annotations

from typing import Callable, List, Optional, Sequence

import numpy as np

from mexformer.numerics.tensor import NonFiniteError


def finite_difference_gradient(
    function: Callable[[List[np.ndarray]], float],
    params: Sequence[np.ndarray],
    h: float = 1e-5,
    indices: Optional[Sequence[Optional[Sequence[tuple]]]] = None,
) -> List[np.ndarray]:
    """Estimate the gradient of a scalar function by central differences.

    Each coordinate is perturbed by ±h in turn and the derivative is estimated as
    (f(p+h) − f(p−h)) / 2h.

    Args:
        function: maps the list of parameter arrays to a scalar
        params: parameter arrays at which to evaluate the gradient; not modified
        h: perturbation size, must be positive
        indices: optional per-parameter list of coordinates to estimate. ``None``
            (for the whole argument, or for one parameter) means every coordinate.
            Coordinates that are not estimated are NaN in the result.

    Returns:
        one array per parameter, with the parameter's shape

    Raises:
        ValueError: if h is not positive
        NonFiniteError: if the function evaluates to a non-finite value
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    working = [np.array(param, dtype=np.float64, copy=True) for param in params]
    gradients = []
    for position, param in enumerate(working):
        selected = None if indices is None else indices[position]
        if selected is None:
            gradient = np.zeros(param.shape)
            coordinates = list(np.ndindex(param.shape))
        else:
            gradient = np.full(param.shape, np.nan)
            coordinates = [tuple(index) for index in selected]
        for index in coordinates:
            original = param[index]
            param[index] = original + h
            upper = _evaluate(function, working)
            param[index] = original - h
            lower = _evaluate(function, working)
            param[index] = original
            gradient[index] = (upper - lower) / (2.0 * h)
        gradients.append(gradient)
    return gradients


def _evaluate(function, params) -> float:
    value = float(function(params))
    if not np.isfinite(value):
        raise NonFiniteError(f"function evaluated to {value} at a perturbed point")
    return value


def max_relative_error(
    analytic: Sequence[np.ndarray], numeric: Sequence[np.ndarray], floor: float = 1e-5
) -> float:
    """Largest |a − n| / max(|a|, |n|, floor) over all estimated coordinates.

    NaN coordinates of ``numeric`` (not estimated) are skipped.
    """
    worst = 0.0
    for left, right in zip(analytic, numeric):
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        mask = ~np.isnan(right)
        if not mask.any():
            continue
        denominator = np.maximum(np.maximum(np.abs(left[mask]), np.abs(right[mask])), floor)
        worst = max(worst, float(np.max(np.abs(left[mask] - right[mask]) / denominator)))
    return worst
