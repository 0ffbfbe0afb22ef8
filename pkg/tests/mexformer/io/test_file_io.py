import pandas as pd
import pytest

from mexformer.io import file_io


def test_make_directory(tmp_path):
    target = tmp_path / "nested" / "dir"
    assert not file_io.does_file_or_directory_exist(target)
    file_io.make_directory(target)
    assert file_io.does_file_or_directory_exist(target)
    with pytest.raises(OSError):
        file_io.make_directory(target)
    file_io.make_directory(target, exist_ok=True)


def test_text_round_trip(tmp_path):
    path = tmp_path / "notes.txt"
    file_io.write_string_to_file(path, "first\nsecond\n")
    assert file_io.load_text_file(path) == ["first\n", "second\n"]
    assert file_io.does_file_or_directory_exist(path)


def test_bytes_round_trip(tmp_path):
    path = tmp_path / "payload.bin"
    file_io.write_bytes_to_file(path, b"\x00\x01SLFL")
    assert file_io.load_bytes_from_file(path) == b"\x00\x01SLFL"
    with pytest.raises(FileNotFoundError):
        file_io.load_bytes_from_file(tmp_path / "missing.bin")


def test_csv_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    frame = pd.DataFrame({"sample_id": ["a", "b"], "onset": ["0", "3"]})
    file_io.write_dataframe_to_csv(frame, path, index=False)
    loaded = file_io.load_csv_to_pandas(path, dtype=str)
    pd.testing.assert_frame_equal(loaded, frame)


def test_find_files_matching_path(tmp_path):
    for name in ["flow_002.slfl", "flow_000.slfl", "flow_001.png"]:
        (tmp_path / name).touch()
    found = file_io.find_files_matching_path(tmp_path, "flow_*.slfl")
    assert [path.name for path in found] == ["flow_000.slfl", "flow_002.slfl"]
    assert file_io.find_files_matching_path(tmp_path) == [file_io.get_upath(tmp_path)]


def test_get_upath(tmp_path):
    pointer = file_io.get_upath(str(tmp_path))
    assert file_io.get_upath(pointer) is pointer
    assert file_io.get_upath("") is None


def test_csv_is_read_as_utf8(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_bytes("sample_id,label\nsüjet_01,überraschung\n".encode("utf-8"))
    frame = file_io.load_csv_to_pandas(path, dtype=str)
    assert frame["sample_id"].tolist() == ["süjet_01"]
    assert frame["label"].tolist() == ["überraschung"]

    latin = tmp_path / "latin.csv"
    latin.write_bytes("sample_id,label\nsüjet_01,a\n".encode("latin-1"))
    with pytest.raises(UnicodeDecodeError):
        file_io.load_csv_to_pandas(latin, dtype=str)
    assert file_io.load_csv_to_pandas(latin, encoding="latin-1", dtype=str)["sample_id"][0] == "süjet_01"
