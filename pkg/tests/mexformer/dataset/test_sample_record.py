import pytest
from pydantic import ValidationError

from mexformer.dataset import DatasetName, SampleRecord


def _record(**overrides):
    values = {
        "sample_id": "s01_ep01",
        "dataset": "CASME2",
        "subject_id": "01",
        "frames_dir": "frames/s01_ep01",
        "onset": 10,
        "apex": 14,
        "offset": 30,
        "label": "happiness",
    }
    values.update(overrides)
    return SampleRecord(**values)


def test_record_fields():
    record = _record()
    assert record.dataset == "CASME2"
    assert record.subject_key == "CASME2/01"
    assert record.frame_count == 21
    assert record.resolved_apex == 14
    assert record.landmarks_dir is None


@pytest.mark.parametrize("alias, expected", [("smic", "SMIC-HS"), ("CASME II", "CASME2"), ("samm", "SAMM")])
def test_dataset_aliases(alias, expected):
    assert _record(dataset=alias).dataset == expected


def test_missing_apex_uses_middle_frame():
    record = _record(apex="")
    assert record.apex is None
    assert record.resolved_apex == 20


def test_frame_order_names_the_sample():
    with pytest.raises(ValidationError, match="s01_ep01"):
        _record(apex=5)
    with pytest.raises(ValidationError, match="onset <= apex <= offset"):
        _record(apex=None, onset=31)


def test_unknown_dataset_and_extra_fields():
    with pytest.raises(ValidationError):
        _record(dataset="MMEW")
    with pytest.raises(ValidationError):
        _record(fps=200)


def test_all_names():
    assert DatasetName.all_names() == ["SMIC-HS", "CASME2", "SAMM", "SYNTH"]
