import numpy as np
import pytest

from mexformer.dataset.synth import SynthSpec, synth_generate
from mexformer.preprocess.landmarks import LandmarkSet

# pylint: disable=missing-function-docstring, redefined-outer-name


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def face_landmarks():
    """68 points spread over an ellipse, with the crop-defining points placed explicitly."""
    angles = np.linspace(0.0, 2.0 * np.pi, 68, endpoint=False)
    points = np.stack([100.0 + 40.0 * np.cos(angles), 120.0 + 55.0 * np.sin(angles)], axis=1)
    points[8] = [100.0, 200.0]
    points[19] = [80.0, 80.0]
    points[30] = [100.0, 130.0]
    points[57] = [100.0, 170.0]
    return LandmarkSet(points)


@pytest.fixture
def small_synth_spec():
    return SynthSpec(
        seed=3,
        subjects=2,
        samples_per_subject=2,
        directions=[0.0, 180.0],
        image_size=16,
        frames=5,
        peak_displacement=2.0,
        noise_std=0.5,
    )


@pytest.fixture
def synth_dataset_dir(tmp_path, small_synth_spec):
    synth_generate(small_synth_spec, tmp_path / "synth")
    return tmp_path / "synth"


@pytest.fixture
def static_dataset_dir(tmp_path, small_synth_spec):
    spec = small_synth_spec.model_copy(update={"peak_displacement": 0.0, "noise_std": 0.0, "subjects": 1})
    synth_generate(spec, tmp_path / "static")
    return tmp_path / "static"
