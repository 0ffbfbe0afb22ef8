import json

import numpy as np
import numpy.testing as npt
import pytest

from mexformer.dataset import ClipSample, SynthSpec, load_flow_samples, synth_generate
from mexformer.model.config import AggregatorKind, InitScheme, ModelSpec
from mexformer.model.network import init_weights, sample_loss
from mexformer.numerics import GradTape
from mexformer.pipeline_config import PipelineConfig
from mexformer.preprocess import PreprocessConfig, preprocess_manifest
from mexformer.training import (
    TrainConfig,
    TrainingError,
    evaluate_accuracy,
    global_norm,
    shuffled_order,
    train,
)

CLASSES = ["a", "b"]


@pytest.fixture
def small_spec():
    return ModelSpec.desk(classes=2, layers=1, aggregator="mean", init="fan_in")


@pytest.fixture
def clips(rng):
    return [
        ClipSample(
            sample_id=f"clip{index}",
            dataset="SYNTH",
            subject_id=f"sub{index // 2}",
            label=CLASSES[index % 2],
            frames=rng.uniform(size=(2, 32, 32, 3)) + 0.5 * (index % 2),
        )
        for index in range(4)
    ]


def test_zero_epochs_leave_weights_unchanged(clips, small_spec):
    weights = init_weights(small_spec, seed=1)
    result = train(weights, clips, TrainConfig(epochs=0), small_spec, CLASSES)
    assert result.weights.equals(weights)
    assert result.log == []


def test_same_seed_is_bit_identical(clips, small_spec):
    weights = init_weights(small_spec, seed=1)
    config = TrainConfig(epochs=2, batch_size=3, seed=11)
    first = train(weights, clips, config, small_spec, CLASSES)
    second = train(weights, clips, config, small_spec, CLASSES)
    assert first.log_lines() == second.log_lines()
    assert first.weights.equals(second.weights)
    assert not first.weights.equals(weights)


def test_threaded_gradients_match_serial(clips, small_spec):
    weights = init_weights(small_spec, seed=2)
    serial = train(weights, clips, TrainConfig(epochs=1, seed=3), small_spec, CLASSES)
    threaded = train(weights, clips, TrainConfig(epochs=1, seed=3, workers=3), small_spec, CLASSES)
    assert threaded.weights.equals(serial.weights)
    assert threaded.log_lines() == serial.log_lines()


def test_log_records(clips, small_spec, tmp_path):
    config = TrainConfig(epochs=3, batch_size=3)
    result = train(init_weights(small_spec), clips, config, small_spec, CLASSES)
    assert [record.epoch for record in result.log] == [1, 2, 3]
    assert [record.step for record in result.log] == [2, 4, 6]
    assert result.log[0].lr == pytest.approx(0.5e-3 * (1 + np.cos(np.pi / 6)))
    assert all(0.0 <= record.train_accuracy <= 1.0 for record in result.log)

    log_path = tmp_path / "train.jsonl"
    result.write_log(log_path)
    lines = log_path.read_text().splitlines()
    assert len(lines) == 3
    assert set(json.loads(lines[0])) == {"epoch", "step", "lr", "loss", "train_accuracy"}


def test_full_batch_loss_decreases(clips, small_spec):
    config = TrainConfig(epochs=6, batch_size=4, learning_rate=1e-3, weight_decay=0.0)
    result = train(init_weights(small_spec, seed=4), clips, config, small_spec, CLASSES)
    losses = [record.loss for record in result.log]
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))


def test_shuffled_order_is_counter_based():
    npt.assert_array_equal(shuffled_order(5, 2, 10), shuffled_order(5, 2, 10))
    assert sorted(shuffled_order(5, 2, 10)) == list(range(10))
    assert not np.array_equal(shuffled_order(5, 2, 50), shuffled_order(5, 3, 50))


def test_non_finite_loss_names_sample(clips, small_spec):
    weights = init_weights(small_spec)
    weights = weights.replace({"embed.class_token": np.full((1, 16), 1e308)})
    with np.errstate(all="ignore"):
        with pytest.raises(TrainingError, match="non-finite loss on sample clip"):
            train(weights, clips, TrainConfig(epochs=1), small_spec, CLASSES)


def test_invalid_inputs(clips, small_spec):
    weights = init_weights(small_spec)
    with pytest.raises(ValueError, match="empty"):
        train(weights, [], TrainConfig(epochs=1), small_spec, CLASSES)
    with pytest.raises(ValueError, match="sample clip1: label 'b'"):
        train(weights, clips, TrainConfig(epochs=1), small_spec, ["a", "c"])


@pytest.mark.timeout(600)
def test_overfits_synthetic_set(tmp_path):
    """Three motion directions, four subjects of two clips: training accuracy reaches 1."""
    synth = SynthSpec(
        seed=0,
        subjects=4,
        samples_per_subject=2,
        directions=[0.0, 120.0, 240.0],
        image_size=32,
        frames=5,
        peak_displacement=3.0,
        noise_std=0.5,
        blob_sigma=4.0,
    )
    manifest = synth_generate(synth, tmp_path / "synth")
    preprocess_manifest(manifest, tmp_path / "flow", PreprocessConfig(image_size=32, frame_count=5))
    samples = load_flow_samples(manifest, tmp_path / "flow", flow_input="raw")

    spec = ModelSpec.desk(channels=2, aggregator="mean", init="fan_in")
    config = TrainConfig(epochs=200, learning_rate=1e-3, momentum=0.9, weight_decay=1e-4, batch_size=4)
    result = train(init_weights(spec, seed=0), samples, config, spec, synth.class_names)
    assert max(record.train_accuracy for record in result.log) == 1.0
    accuracy, _ = evaluate_accuracy(result.weights, samples, spec, synth.class_names)
    assert accuracy == 1.0


@pytest.fixture
def zero_onset_clips(rng):
    """Raw two-channel flow clips whose first frame is the all-zero onset field."""
    clips = []
    for index in range(3):
        frames = rng.normal(scale=1.5, size=(3, 32, 32, 2))
        frames[0] = 0.0
        clips.append(
            ClipSample(
                sample_id=f"onset{index}",
                dataset="SYNTH",
                subject_id=f"sub{index}",
                label=["a", "b", "c"][index],
                frames=frames,
            )
        )
    return clips


@pytest.mark.parametrize("kind", ["mean", "lstm"])
def test_first_step_is_bounded_on_zero_flow_frames(zero_onset_clips, kind):
    spec = ModelSpec.desk(classes=3, channels=2, aggregator=kind, init="fan_in")
    classes = ["a", "b", "c"]
    weights = init_weights(spec, seed=0)
    names = list(weights)

    tracked = weights.with_grad(names)
    with GradTape() as tape:
        loss, _ = sample_loss(zero_onset_clips[0].frames, 0, tracked, spec)
    gradients = dict(zip(names, tape.gradient(loss, [tracked[name] for name in names])))
    assert global_norm(gradients) < 1e4

    result = train(weights, zero_onset_clips, TrainConfig(epochs=1, batch_size=3), spec, classes)
    assert result.log[0].step == 1
    for index, clip in enumerate(zero_onset_clips):
        before = sample_loss(clip.frames, index, weights, spec)[0].item()
        after = sample_loss(clip.frames, index, result.weights, spec)[0].item()
        assert np.isfinite(after)
        assert abs(before - np.log(3)) < 1.0
        assert abs(after - before) < 0.05


@pytest.mark.timeout(600)
def test_default_settings_train_on_colour_flow(tmp_path):
    """Colourised flow, vit init, LSTM aggregation and the default optimiser settings."""
    settings = PipelineConfig().with_overrides(["epochs=30"])
    synth = SynthSpec(
        seed=0,
        subjects=4,
        samples_per_subject=2,
        directions=[0.0, 120.0, 240.0],
        image_size=settings.image_size,
        frames=settings.frame_count,
        peak_displacement=3.0,
        noise_std=0.5,
    )
    manifest = synth_generate(synth, tmp_path / "synth")
    preprocess_manifest(manifest, tmp_path / "flow", settings.preprocess_config())
    samples = load_flow_samples(manifest, tmp_path / "flow", settings.flow_input)
    assert samples[0].frames.shape[-1] == 3

    spec = settings.model_spec(len(synth.class_names))
    assert spec.init == InitScheme.VIT and spec.aggregator == AggregatorKind.LSTM
    result = train(init_weights(spec, seed=0), samples, settings.train_config(), spec, synth.class_names)
    losses = [record.loss for record in result.log]
    assert all(np.isfinite(losses))
    assert losses[-1] < losses[0]
