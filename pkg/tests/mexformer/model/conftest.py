import numpy as np
import pytest

from mexformer.model.config import ModelSpec
from mexformer.model.network import expected_shapes
from mexformer.model.weights import ModelWeights

# pylint: disable=missing-function-docstring, redefined-outer-name


@pytest.fixture
def desk_spec():
    return ModelSpec.desk()


@pytest.fixture
def random_weights():
    """Factory of dense random weights (nothing zero) for a model spec."""

    def make(spec, seed=0, std=0.3):
        rng = np.random.default_rng(seed)
        arrays = {}
        for name, shape in expected_shapes(spec).items():
            values = rng.normal(scale=std, size=shape)
            arrays[name] = 1.0 + 0.1 * values if name.endswith(".gamma") else values
        return ModelWeights(arrays)

    return make


@pytest.fixture
def desk_clip(rng):
    return rng.uniform(size=(3, 32, 32, 3))
