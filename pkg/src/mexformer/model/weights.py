"""Named-tensor container for all network parameters"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Dict, Iterable, Iterator, Optional

import numpy as np

from mexformer.numerics import Tensor


class ModelWeights(Mapping):
    """Ordered, immutable mapping of parameter names to tensors.

    Names are dotted paths such as ``encoder.0.attn.query.weight``. Order is the order
    of construction and is preserved by every derived container, so weight files
    written from it are reproducible.
    """

    def __init__(self, tensors: Mapping[str, Tensor | np.ndarray]):
        self._tensors: Dict[str, Tensor] = {
            name: value if isinstance(value, Tensor) else Tensor(value) for name, value in tensors.items()
        }

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._tensors[name]
        except KeyError:
            raise KeyError(f"missing weight {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def __repr__(self) -> str:
        return f"ModelWeights({len(self)} tensors, {self.parameter_count()} values)"

    def scope(self, prefix: str) -> WeightScope:
        """View of the weights under ``prefix.``, addressed by the remaining name."""
        return WeightScope(self, prefix)

    def has_prefix(self, prefix: str) -> bool:
        return any(name.startswith(prefix + ".") for name in self._tensors)

    def parameter_count(self) -> int:
        return sum(tensor.size for tensor in self._tensors.values())

    def replace(self, updates: Mapping[str, Tensor | np.ndarray]) -> ModelWeights:
        """New container with some tensors swapped, keeping the original order.

        Raises:
            KeyError: if an update names a weight that does not exist
        """
        unknown = [name for name in updates if name not in self._tensors]
        if unknown:
            raise KeyError(f"cannot replace unknown weights {unknown}")
        return ModelWeights({name: updates.get(name, tensor) for name, tensor in self._tensors.items()})

    def with_grad(self, names: Optional[Iterable[str]] = None) -> ModelWeights:
        """Copy whose tensors (all, or only ``names``) are recorded on the active tape."""
        selected = set(self._tensors) if names is None else set(names)
        return ModelWeights(
            {
                name: tensor.with_grad() if name in selected else tensor.detach()
                for name, tensor in self._tensors.items()
            }
        )

    def detach(self) -> ModelWeights:
        return ModelWeights({name: tensor.detach() for name, tensor in self._tensors.items()})

    def astype(self, dtype) -> ModelWeights:
        return ModelWeights({name: tensor.astype(dtype) for name, tensor in self._tensors.items()})

    @property
    def dtype(self) -> np.dtype:
        """Floating point type of the first tensor; all tensors share it in practice."""
        return next(iter(self._tensors.values())).dtype

    def numpy(self) -> Dict[str, np.ndarray]:
        """Writable copies of all tensors, in container order."""
        return {name: tensor.numpy() for name, tensor in self._tensors.items()}

    def equals(self, other: Mapping[str, Tensor | np.ndarray]) -> bool:
        """True when names, order, dtypes and values are all identical."""
        if list(self._tensors) != list(other):
            return False
        for name, tensor in self._tensors.items():
            value = other[name]
            array = value.data if isinstance(value, Tensor) else np.asarray(value)
            if array.dtype != tensor.dtype or not np.array_equal(array, tensor.data):
                return False
        return True


class WeightScope(Mapping):
    """Read-only view of the weights sharing a dotted prefix."""

    def __init__(self, weights: ModelWeights, prefix: str):
        self.weights = weights
        self.prefix = prefix

    def full_name(self, name: str) -> str:
        return f"{self.prefix}.{name}"

    def __getitem__(self, name: str) -> Tensor:
        return self.weights[self.full_name(name)]

    def __iter__(self) -> Iterator[str]:
        start = len(self.prefix) + 1
        return (name[start:] for name in self.weights if name.startswith(self.prefix + "."))

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def scope(self, prefix: str) -> WeightScope:
        return WeightScope(self.weights, self.full_name(prefix))


def scoped(weights: Mapping, prefix: str) -> Mapping:
    """Sub-view of any weight mapping under ``prefix.``, keyed by the remaining name."""
    if isinstance(weights, (ModelWeights, WeightScope)):
        return weights.scope(prefix)
    start = len(prefix) + 1
    return {name[start:]: value for name, value in weights.items() if name.startswith(prefix + ".")}
