"""Runtime benchmarks of flow estimation, frame encoding, and metric computation.

For more information on writing benchmarks:
https://asv.readthedocs.io/en/stable/writing_benchmarks.html."""

import numpy as np

from mexformer.dataset.synth import SynthSpec, render_clip
from mexformer.evaluation import ConfusionMatrix
from mexformer.evaluation.metrics import uar, uf1
from mexformer.flow.estimation import estimate_flow
from mexformer.flow.long_term import long_term_flow
from mexformer.model.config import ModelSpec
from mexformer.model.encoder import encode_frame
from mexformer.model.network import init_weights, sample_loss
from mexformer.numerics.tensor import GradTape


def time_confusion_metrics():
    """Score a large random prediction list"""
    rng = np.random.default_rng(0)
    truths = rng.integers(5, size=100_000).tolist()
    predictions = rng.integers(5, size=100_000).tolist()
    cm = ConfusionMatrix.from_predictions(truths, predictions, list("abcde"))
    assert 0.0 <= uf1(cm) <= 1.0
    assert 0.0 <= uar(cm) <= 1.0


class FlowSuite:
    def __init__(self) -> None:
        """Just initialize things"""
        self.frames = None

    def setup(self):
        spec = SynthSpec(image_size=64, frames=11, peak_displacement=3.0, noise_std=0.5)
        self.frames = render_clip(spec, subject=0, sample=0, direction=45.0)

    def time_estimate_flow_pair(self):
        estimate_flow(self.frames[0], self.frames[5])

    def time_long_term_flow_clip(self):
        long_term_flow(self.frames, onset_index=0)


class DeskModelSuite:
    def __init__(self) -> None:
        """Just initialize things"""
        self.spec = None
        self.weights = None
        self.clip = None

    def setup(self):
        self.spec = ModelSpec.desk()
        self.weights = init_weights(self.spec, seed=0)
        self.clip = np.random.default_rng(1).uniform(size=(5, 32, 32, 3))

    def time_encode_frame(self):
        encode_frame(self.clip[0], self.weights, self.spec.embed, self.spec.encoder)

    def time_sample_gradient(self):
        params = self.weights.with_grad()
        with GradTape() as tape:
            loss, _ = sample_loss(self.clip, 0, params, self.spec)
        tape.gradient(loss, list(params.values()))
