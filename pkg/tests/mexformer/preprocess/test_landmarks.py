import numpy as np
import numpy.testing as npt
import pytest

from mexformer.preprocess import LandmarkSet, read_landmark_file, write_landmark_file


def test_landmark_file_round_trip(tmp_path, face_landmarks):
    path = tmp_path / "000003.txt"
    write_landmark_file(face_landmarks, path)
    npt.assert_array_equal(read_landmark_file(path).points, face_landmarks.points)


def test_landmark_set_validation():
    with pytest.raises(ValueError, match="68"):
        LandmarkSet(np.zeros((67, 2)))
    points = np.zeros((68, 2))
    points[3, 1] = np.nan
    with pytest.raises(ValueError, match="NaN"):
        LandmarkSet(points)


def test_landmarks_are_read_only(face_landmarks):
    with pytest.raises(ValueError):
        face_landmarks.points[0, 0] = 1.0


def test_read_landmark_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_landmark_file(tmp_path / "missing.txt")
    short = tmp_path / "short.txt"
    short.write_text("1 2\n3 4\n", encoding="utf-8")
    with pytest.raises(ValueError, match="expected 68 landmarks"):
        read_landmark_file(short)
    malformed = tmp_path / "malformed.txt"
    malformed.write_text("1 2 3\n", encoding="utf-8")
    with pytest.raises(ValueError, match="malformed.txt:1"):
        read_landmark_file(malformed)
