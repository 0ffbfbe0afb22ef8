import numpy as np
import numpy.testing as npt
import pytest

from mexformer.io.weight_file import WEIGHT_MAGIC, decode_weights, encode_weights, load_weights, save_weights
from mexformer.model.config import ModelSpec
from mexformer.model.network import init_weights


def test_layout():
    payload = encode_weights({"w": np.array([[1.0, 2.0]], dtype=np.float32)})
    assert payload[:4] == WEIGHT_MAGIC == b"SLST"
    assert np.frombuffer(payload[4:12], dtype="<u4").tolist() == [1, 1]
    assert np.frombuffer(payload[12:14], dtype="<u2").tolist() == [1]
    assert payload[14:15] == b"w"
    assert list(payload[15:17]) == [0, 2]
    assert np.frombuffer(payload[17:33], dtype="<u8").tolist() == [1, 2]
    npt.assert_array_equal(np.frombuffer(payload[33:], dtype="<f4"), [1.0, 2.0])


def test_model_weights_round_trip_bit_identical(tmp_path):
    weights = init_weights(ModelSpec.desk(), seed=4)
    path = tmp_path / "model.slst"
    save_weights(weights, path)
    loaded = load_weights(path)
    assert list(loaded) == list(weights)
    assert loaded.equals(weights)
    second = tmp_path / "again.slst"
    save_weights(loaded, second)
    assert second.read_bytes() == path.read_bytes()


def test_dtypes_and_scalars_survive():
    arrays = {
        "single": np.arange(6, dtype=np.float32).reshape(2, 3),
        "double": np.array([np.pi, -0.0, 1e-300]),
        "scalar": np.array(2.5),
    }
    decoded = decode_weights(encode_weights(arrays))
    assert list(decoded) == ["single", "double", "scalar"]
    for name, array in arrays.items():
        assert decoded[name].dtype == array.dtype
        assert decoded[name].shape == array.shape
        npt.assert_array_equal(decoded[name], array)


def test_decode_errors():
    payload = encode_weights({"w": np.zeros(3)})
    with pytest.raises(ValueError, match="bad magic"):
        decode_weights(b"XXXX" + payload[4:])
    with pytest.raises(ValueError, match="version 2"):
        decode_weights(payload[:4] + np.array([2], dtype="<u4").tobytes() + payload[8:])
    with pytest.raises(ValueError, match="truncated"):
        decode_weights(payload[:-1])
    with pytest.raises(ValueError, match="trailing"):
        decode_weights(payload + b"\x00")
    duplicated = encode_weights({"w": np.zeros(1)})
    body = duplicated[12:]
    with pytest.raises(ValueError, match="duplicate tensor name 'w'"):
        decode_weights(duplicated[:8] + np.array([2], dtype="<u4").tobytes() + body + body)


def test_unsupported_dtype():
    with pytest.raises(ValueError, match="unsupported dtype int64"):
        encode_weights({"w": np.arange(3)})


def test_load_errors_name_the_file(tmp_path):
    path = tmp_path / "broken.slst"
    path.write_bytes(b"SLST\x01")
    with pytest.raises(ValueError, match="broken.slst"):
        load_weights(path)
    with pytest.raises(FileNotFoundError):
        load_weights(tmp_path / "missing.slst")
