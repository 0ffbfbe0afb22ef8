import numpy as np
import numpy.testing as npt
import pytest

from mexformer.io.images import read_image, read_image_size, write_image


@pytest.mark.parametrize("suffix", [".png", ".ppm"])
def test_rgb_round_trip(tmp_path, rng, suffix):
    image = rng.integers(0, 256, size=(6, 9, 3), dtype=np.uint8)
    path = tmp_path / f"frame{suffix}"
    write_image(image, path)
    npt.assert_array_equal(read_image(path), image.astype(np.float64))
    assert read_image_size(path) == (9, 6)


def test_grayscale_round_trip(tmp_path):
    image = np.arange(48, dtype=np.float64).reshape(6, 8) * 5.2
    path = tmp_path / "frame.png"
    write_image(image, path)
    npt.assert_array_equal(read_image(path), np.round(image))


def test_float_values_are_clipped(tmp_path):
    path = tmp_path / "frame.png"
    write_image(np.array([[-20.0, 300.0]]), path)
    npt.assert_array_equal(read_image(path), [[0.0, 255.0]])


def test_read_rgb_as_grayscale(tmp_path):
    path = tmp_path / "frame.png"
    write_image(np.full((4, 4, 3), 100, dtype=np.uint8), path)
    npt.assert_array_equal(read_image(path, grayscale=True), np.full((4, 4), 100.0))


def test_write_errors(tmp_path):
    with pytest.raises(ValueError, match="unsupported image suffix"):
        write_image(np.zeros((4, 4)), tmp_path / "frame.jpg")
    with pytest.raises(ValueError, match="shape"):
        write_image(np.zeros((4, 4, 2)), tmp_path / "frame.png")


def test_read_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_image(tmp_path / "missing.png")
