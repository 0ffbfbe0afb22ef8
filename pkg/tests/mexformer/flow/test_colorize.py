import numpy as np
import numpy.testing as npt
import pytest

from mexformer.flow import FlowField, colorize_flow, flow_hsv


def _uniform(u, v, size=4):
    return FlowField(np.full((size, size), u), np.full((size, size), v))


def test_zero_field_is_white():
    image = colorize_flow(FlowField.zeros(5, 3))
    assert image.shape == (3, 5, 3)
    assert image.dtype == np.uint8
    assert (image == 255).all()
    assert (colorize_flow(FlowField.zeros(5, 3), max_magnitude=2.0) == 255).all()


def test_opposite_flows_have_opposite_hues():
    right = flow_hsv(_uniform(1.5, 0.0))
    left = flow_hsv(_uniform(-1.5, 0.0))
    npt.assert_allclose(right[..., 0], 0.0)
    npt.assert_allclose(left[..., 0], 0.5)
    npt.assert_array_equal(colorize_flow(_uniform(1.5, 0.0))[0, 0], [255, 0, 0])
    npt.assert_array_equal(colorize_flow(_uniform(-1.5, 0.0))[0, 0], [0, 255, 255])


def test_unit_flow_at_full_saturation():
    image = colorize_flow(_uniform(1.0, 0.0), max_magnitude=1.0)
    npt.assert_array_equal(image, np.tile([255, 0, 0], (4, 4, 1)))


def test_saturation_clamps():
    hsv = flow_hsv(_uniform(0.0, 3.0), max_magnitude=1.5)
    npt.assert_allclose(hsv[..., 1], 1.0)
    npt.assert_allclose(hsv[..., 0], 0.25)
    hsv = flow_hsv(_uniform(0.0, 0.75), max_magnitude=1.5)
    npt.assert_allclose(hsv[..., 1], 0.5)


def test_colorize_is_deterministic_and_scale_invariant_in_hue():
    rng = np.random.default_rng(8)
    field = FlowField(rng.normal(size=(6, 7)), rng.normal(size=(6, 7)))
    assert colorize_flow(field).tobytes() == colorize_flow(field).tobytes()
    npt.assert_allclose(flow_hsv(field)[..., 0], flow_hsv(field.scaled(3.7))[..., 0], atol=1e-12)
    npt.assert_allclose(flow_hsv(field)[..., 1], flow_hsv(field.scaled(3.7))[..., 1], atol=1e-12)


def test_invalid_max_magnitude():
    with pytest.raises(ValueError, match="positive"):
        colorize_flow(_uniform(1.0, 0.0), max_magnitude=0.0)
    with pytest.raises(ValueError, match="positive"):
        colorize_flow(_uniform(1.0, 0.0), max_magnitude=-1.0)
