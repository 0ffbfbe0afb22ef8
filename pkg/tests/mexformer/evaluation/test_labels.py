import pytest

from mexformer.evaluation.labels import CDE_CLASSES, cde_label_map, sde_label


@pytest.mark.parametrize(
    "dataset,label,expected",
    [
        ("SMIC-HS", "negative", "negative"),
        ("SMIC-HS", "positive", "positive"),
        ("SMIC-HS", "surprise", "surprise"),
        ("CASME2", "Happiness", "positive"),
        ("CASME2", "Surprise", "surprise"),
        ("CASME2", "Disgust", "negative"),
        ("CASME2", "Repression", "negative"),
        ("CASME2", "Fear", "negative"),
        ("CASME2", "Sadness", "negative"),
        ("CASME2", "Others", None),
        ("SAMM", "Happiness", "positive"),
        ("SAMM", "Surprise", "surprise"),
        ("SAMM", "Anger", "negative"),
        ("SAMM", "Contempt", "negative"),
        ("SAMM", "Disgust", "negative"),
        ("SAMM", "Fear", "negative"),
        ("SAMM", "Sadness", "negative"),
        ("SAMM", "Other", None),
    ],
)
def test_composite_table(dataset, label, expected):
    assert cde_label_map(dataset, label) == expected
    assert cde_label_map(dataset, f" {label.upper()} ") == expected


def test_composite_classes():
    assert CDE_CLASSES == ("negative", "positive", "surprise")


def test_composite_errors():
    with pytest.raises(ValueError, match="unknown CASME2 label 'Joy'"):
        cde_label_map("CASME2", "Joy")
    with pytest.raises(ValueError, match="no composite label mapping"):
        cde_label_map("SYNTH", "dir0")


def test_sole_database_labels():
    assert sde_label("CASME2", "happiness") == "Happiness"
    assert sde_label("CASME2", "Others") == "Others"
    assert sde_label("CASME2", "Fear") is None
    assert sde_label("SAMM", "Other") == "Other"
    assert sde_label("SAMM", "Sadness") is None
    assert sde_label("SMIC-HS", "surprise") == "surprise"
    with pytest.raises(ValueError, match="unknown SAMM label"):
        sde_label("SAMM", "Joy")
    with pytest.raises(ValueError, match="no fixed"):
        sde_label("SYNTH", "dir0")
