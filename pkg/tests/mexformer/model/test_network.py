import numpy as np
import numpy.testing as npt
import pytest

from mexformer.model.config import AggregatorKind, ModelSpec
from mexformer.model.network import (
    check_weights,
    expected_shapes,
    forward_sample,
    init_weights,
    predict,
    sample_loss,
)
from mexformer.numerics import GradTape, ShapeError, finite_difference_gradient, max_relative_error


def test_expected_shapes(desk_spec):
    shapes = expected_shapes(desk_spec)
    assert shapes["embed.patch_fc.weight"] == (192, 16)
    assert shapes["embed.class_token"] == (1, 16)
    assert shapes["embed.position"] == (17, 16)
    assert shapes["encoder.1.attn.output.weight"] == (16, 16)
    assert shapes["encoder.1.ff.fc1.weight"] == (16, 64)
    assert shapes["aggregator.lstm.2.cell.weight"] == (32, 16)
    assert shapes["head.fc2.weight"] == (16, 3)
    assert "encoder.2.ln1.gamma" not in shapes
    mean_shapes = expected_shapes(ModelSpec.desk(aggregator="mean"))
    assert not any(name.startswith("aggregator.") for name in mean_shapes)


def test_init_is_seeded(desk_spec):
    first = init_weights(desk_spec, seed=5)
    assert first.equals(init_weights(desk_spec, seed=5))
    assert not first.equals(init_weights(desk_spec, seed=6))
    assert list(first) == list(expected_shapes(desk_spec))


def test_init_values(desk_spec):
    weights = init_weights(desk_spec, seed=1)
    for table in ("embed.class_token", "embed.position"):
        assert np.abs(weights[table].data).max() <= 0.04
        assert weights[table].data.std() > 0.01
    assert weights["embed.position"].data.std(axis=1).min() > 1e-3
    npt.assert_array_equal(weights["encoder.0.ln1.gamma"].data, np.ones(16))
    npt.assert_array_equal(weights["encoder.0.attn.query.bias"].data, np.zeros(16))
    patch = weights["embed.patch_fc.weight"].data
    assert np.abs(patch).max() <= 0.04
    assert 0.01 < patch.std() < 0.02
    assert np.abs(weights["aggregator.lstm.0.forget.weight"].data).max() <= 0.25
    assert np.abs(weights["head.fc1.weight"].data).max() <= 0.25

    fan_in = init_weights(ModelSpec.desk(init="fan_in"), seed=1)
    assert np.abs(fan_in["embed.patch_fc.weight"].data).max() <= 2 / np.sqrt(192)
    assert fan_in["embed.patch_fc.weight"].data.std() > 0.04
    assert np.abs(fan_in["embed.position"].data).max() <= 0.04


def test_init_dtype(desk_spec):
    assert init_weights(desk_spec, dtype=np.float32).dtype == np.float32


def test_check_weights(desk_spec):
    weights = init_weights(desk_spec)
    check_weights(weights, desk_spec)
    with pytest.raises(ShapeError, match="missing"):
        check_weights(weights, ModelSpec.desk(layers=3))
    with pytest.raises(ShapeError, match="unexpected"):
        check_weights(weights, ModelSpec.desk(aggregator="mean"))
    with pytest.raises(ShapeError, match=r"head.fc2.weight has shape \(16, 3\)"):
        check_weights(weights, ModelSpec.desk(classes=4))


@pytest.mark.parametrize("kind", AggregatorKind.all_kinds())
def test_forward_sample(desk_clip, kind):
    spec = ModelSpec.desk(aggregator=kind)
    weights = init_weights(spec, seed=2)
    probabilities = forward_sample(desk_clip, weights, spec)
    assert probabilities.shape == (1, 3)
    assert probabilities.data.sum() == pytest.approx(1.0, abs=1e-9)
    assert predict(desk_clip, weights, spec) == int(np.argmax(probabilities.data))
    npt.assert_array_equal(forward_sample(desk_clip, weights, spec).data, probabilities.data)


def test_forward_rejects_bad_clip(desk_spec):
    with pytest.raises(ShapeError, match="clip shaped"):
        forward_sample(np.zeros((32, 32, 3)), init_weights(desk_spec), desk_spec)


@pytest.mark.timeout(120)
@pytest.mark.parametrize("kind", AggregatorKind.all_kinds())
def test_loss_gradient_for_every_parameter(random_weights, desk_clip, rng, kind):
    """Analytic gradients of the clip loss match central differences for every weight tensor."""
    spec = ModelSpec.desk(aggregator=kind)
    weights = random_weights(spec, seed=7)
    names = list(weights)

    tracked = weights.with_grad()
    with GradTape() as tape:
        loss, _ = sample_loss(desk_clip, 1, tracked, spec)
    analytic = tape.gradient(loss, [tracked[name] for name in names])
    assert all(gradient.shape == weights[name].shape for gradient, name in zip(analytic, names))

    picks = [
        [tuple(int(rng.integers(dim)) for dim in weights[name].shape) for _ in range(2)] for name in names
    ]
    numeric = finite_difference_gradient(
        lambda arrays: sample_loss(desk_clip, 1, weights.replace(dict(zip(names, arrays))), spec)[0].item(),
        [weights[name].numpy() for name in names],
        indices=picks,
    )
    assert max_relative_error(analytic, numeric) <= 1e-4


@pytest.mark.timeout(300)
@pytest.mark.parametrize("kind", AggregatorKind.all_kinds())
def test_full_gradient_on_clip_with_zero_frame(rng, kind):
    """Every coordinate of every tensor, at initialisation, on a clip starting with a zero flow frame."""
    spec = ModelSpec.desk(
        classes=3,
        aggregator=kind,
        channels=2,
        image_size=8,
        patch_size=4,
        width=8,
        layers=1,
        heads=2,
        init="fan_in",
    )
    weights = init_weights(spec, seed=3)
    names = list(weights)
    clip = rng.normal(size=(3, 8, 8, 2))
    clip[0] = 0.0

    tracked = weights.with_grad()
    with GradTape() as tape:
        loss, _ = sample_loss(clip, 2, tracked, spec)
    analytic = tape.gradient(loss, [tracked[name] for name in names])

    numeric = finite_difference_gradient(
        lambda arrays: sample_loss(clip, 2, weights.replace(dict(zip(names, arrays))), spec)[0].item(),
        [weights[name].numpy() for name in names],
    )
    assert not any(np.isnan(gradient).any() for gradient in numeric)
    assert max_relative_error(analytic, numeric) <= 1e-4
    assert max(float(np.abs(gradient).max()) for gradient in analytic) < 1e3
