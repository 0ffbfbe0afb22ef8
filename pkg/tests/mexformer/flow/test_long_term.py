import numpy as np
import pytest

from mexformer.flow import FlowField, long_term_flow, short_term_flow
from mexformer.flow import long_term as long_term_module


def test_static_sequence_gives_zero_fields(textured_image):
    frames = [textured_image(32, 32)] * 4
    fields = long_term_flow(frames, onset_index=0)
    assert len(fields) == 4
    assert max(field.max_abs() for field in fields) <= 1e-6


def test_onset_field_skips_estimator(mocker, textured_image):
    frames = [textured_image(32, 32), textured_image(32, 32, 1.0, 0.0), textured_image(32, 32, 2.0, 0.0)]
    spy = mocker.spy(long_term_module, "estimate_flow")
    fields = long_term_flow(frames, onset_index=1)
    assert spy.call_count == 2
    assert fields[1] == FlowField.zeros(32, 32)
    assert fields[0].mean_vector(border=6)[0] < 0 < fields[2].mean_vector(border=6)[0]


def test_ramp_magnitudes_peak_at_apex(ramp_frames):
    fields = long_term_flow(ramp_frames, onset_index=0)
    magnitudes = [field.mean_magnitude() for field in fields]
    apex = 3
    assert int(np.argmax(magnitudes)) == apex
    assert all(magnitudes[i] <= magnitudes[i + 1] for i in range(apex))
    assert all(magnitudes[i] >= magnitudes[i + 1] for i in range(apex, len(magnitudes) - 1))


def test_threaded_matches_serial(ramp_frames):
    serial = long_term_flow(ramp_frames, onset_index=0)
    threaded = long_term_flow(ramp_frames, onset_index=0, workers=3)
    assert serial == threaded


def test_long_term_flow_errors(textured_image):
    with pytest.raises(ValueError, match="at least one frame"):
        long_term_flow([], onset_index=0)
    with pytest.raises(ValueError, match="onset index"):
        long_term_flow([textured_image(16, 16)], onset_index=1)


def test_short_term_flow(ramp_frames):
    fields = short_term_flow(ramp_frames)
    assert len(fields) == len(ramp_frames)
    assert fields[0] == FlowField.zeros(48, 48)
    # steps of +1, +1, +1, -1, -1 px
    directions = [field.mean_vector()[0] for field in fields[1:]]
    assert all(value > 0 for value in directions[:3])
    assert all(value < 0 for value in directions[3:])
    with pytest.raises(ValueError, match="at least one frame"):
        short_term_flow([])
