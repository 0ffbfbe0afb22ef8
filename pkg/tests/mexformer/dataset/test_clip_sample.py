import numpy as np
import numpy.testing as npt
import pytest

from mexformer.dataset import ClipSample, load_flow_samples, load_manifest
from mexformer.flow import FlowInput
from mexformer.io import manifest_file
from mexformer.preprocess import PreprocessConfig, preprocess_manifest


@pytest.fixture
def flow_dir(tmp_path, synth_dataset_dir):
    manifest = load_manifest(manifest_file(synth_dataset_dir))
    preprocess_manifest(manifest, tmp_path / "flow", PreprocessConfig(image_size=16, frame_count=3))
    return tmp_path / "flow"


def test_load_colour_samples(synth_dataset_dir, flow_dir):
    manifest = load_manifest(manifest_file(synth_dataset_dir))
    samples = load_flow_samples(manifest, flow_dir)
    assert [sample.sample_id for sample in samples] == [record.sample_id for record in manifest]
    first = samples[0]
    assert first.frames.shape == (3, 16, 16, 3)
    assert first.subject_key == "SYNTH/sub00"
    assert first.label == "dir0"
    assert 0.0 <= first.frames.min() and first.frames.max() <= 1.0


def test_load_raw_samples(synth_dataset_dir, flow_dir):
    manifest = load_manifest(manifest_file(synth_dataset_dir))
    samples = load_flow_samples(manifest, flow_dir, flow_input=FlowInput.RAW)
    assert samples[0].frames.shape == (3, 16, 16, 2)
    assert samples[0].frame_count == 3


def test_missing_flow_files(tmp_path, synth_dataset_dir):
    manifest = load_manifest(manifest_file(synth_dataset_dir))
    with pytest.raises(FileNotFoundError, match="s00_00"):
        load_flow_samples(manifest, tmp_path / "nowhere")


def test_clip_sample_validation():
    sample = ClipSample("a", "SYNTH", "sub00", "dir0", np.zeros((2, 4, 4, 3)))
    assert sample.with_label("negative").label == "negative"
    npt.assert_array_equal(sample.with_label("negative").frames, sample.frames)
    with pytest.raises(ValueError, match="read-only"):
        sample.frames[0, 0, 0, 0] = 1.0
    with pytest.raises(ValueError, match=r"\(F, H, W, C\)"):
        ClipSample("b", "SYNTH", "sub00", "dir0", np.zeros((4, 4, 3)))
