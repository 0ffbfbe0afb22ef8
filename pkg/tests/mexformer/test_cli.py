import json

import pytest

from mexformer.cli import main
from mexformer.io import file_io, paths
from mexformer.io.flow_file import read_flow_file
from mexformer.io.weight_file import load_weights
from mexformer.pipeline_config import PipelineConfig


def test_metrics_on_perfect_predictions(tmp_path, capsys):
    predictions = tmp_path / "predictions.csv"
    predictions.write_text(
        "sample_id,true,predicted\na,negative,negative\nb,positive,positive\nc,surprise,surprise\n"
    )
    assert main(["metrics", "--predictions", str(predictions)]) == 0
    content = json.loads(capsys.readouterr().out)
    assert content["uf1"] == 1.0
    assert content["uar"] == 1.0
    assert content["label_set"] == ["negative", "positive", "surprise"]


def test_metrics_outputs(tmp_path):
    predictions = tmp_path / "predictions.csv"
    predictions.write_text("true,predicted\na,a\na,b\nb,b\na,a\n")
    output = tmp_path / "metrics.json"
    plot = tmp_path / "confusion.png"
    arguments = ["metrics", "--predictions", str(predictions), "--output", str(output), "--plot", str(plot)]
    assert main(arguments + ["--classes", "b,a"]) == 0
    content = json.loads(output.read_text())
    assert content["label_set"] == ["b", "a"]
    assert content["confusion"] == [[1, 0], [1, 2]]
    assert plot.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_failures_print_one_line_and_return_nonzero(tmp_path, capsys):
    missing = tmp_path / "nothing.csv"
    assert main(["metrics", "--predictions", str(missing)]) == 1
    errors = [line for line in capsys.readouterr().err.splitlines() if line.startswith("error: ")]
    assert len(errors) == 1
    assert "nothing.csv" in errors[0]

    predictions = tmp_path / "bad.csv"
    predictions.write_text("true,predicted\na,z\n")
    assert main(["metrics", "--predictions", str(predictions), "--classes", "a,b"]) == 1
    assert "bad.csv: class 'z' not in" in capsys.readouterr().err


def test_bad_settings_are_reported(tmp_path, capsys):
    output = tmp_path / "synth"
    assert main(["synth", "--output", str(output), "--subjects", "1", "--frames", "3"]) == 0
    manifest = str(paths.manifest_file(output))
    flow_dir = str(tmp_path / "flow")
    status = main(["preprocess", "--manifest", manifest, "--output", flow_dir, "--set", "oops=1"])
    assert status == 1
    assert "oops" in capsys.readouterr().err
    status = main(["train", "--manifest", manifest, "--flow-dir", flow_dir, "--output", "w.slst"])
    assert status == 1
    assert "error:" in capsys.readouterr().err


def test_preprocess_static_clips_gives_zero_flow(tmp_path, capsys):
    dataset = tmp_path / "static"
    arguments = ["--subjects", "1", "--frames", "5", "--peak", "0", "--noise", "0"]
    assert main(["synth", "--output", str(dataset), *arguments]) == 0
    flow_dir = tmp_path / "flow"
    manifest = str(paths.manifest_file(dataset))
    assert main(["preprocess", "--manifest", manifest, "--output", str(flow_dir), "--visualize"]) == 0
    flow_files = file_io.find_files_matching_path(flow_dir, "*", "flow_*.slfl")
    assert len(flow_files) == 2 * 5
    assert all(read_flow_file(path).max_abs() <= 1e-6 for path in flow_files)
    assert len(file_io.find_files_matching_path(flow_dir, "*", "flow_*.png")) == 2 * 5
    assert PipelineConfig.read_from_file(flow_dir / paths.CONFIG_FILENAME) == PipelineConfig()

    weights = str(tmp_path / "w.slst")
    arguments = ["--manifest", manifest, "--flow-dir", str(flow_dir), "--output", weights]
    assert main(["train", *arguments, "--set", "epochs=1"]) == 1
    error = capsys.readouterr().err
    assert "SYNTH has no composite label mapping" in error
    assert "sole-database protocol (protocol=sde)" in error


@pytest.mark.timeout(300)
def test_synth_train_evaluate(tmp_path):
    dataset = tmp_path / "synth"
    flow_dir = tmp_path / "flow"
    assert (
        main(
            [
                "synth",
                "--output",
                str(dataset),
                "--subjects",
                "2",
                "--samples-per-subject",
                "2",
                "--directions",
                "0,180",
                "--frames",
                "5",
            ]
        )
        == 0
    )
    manifest = str(paths.manifest_file(dataset))
    settings = tmp_path / "settings.properties"
    settings.write_text("flow_input = raw\naggregator = mean\nprotocol = sde\nflow_iterations = 20\n")
    common = ["--manifest", manifest, "--config", str(settings)]
    assert main(["preprocess", *common, "--output", str(flow_dir)]) == 0

    weights = tmp_path / "model.slst"
    log = tmp_path / "train.jsonl"
    arguments = ["train", *common, "--flow-dir", str(flow_dir), "--output", str(weights), "--log", str(log)]
    assert main(arguments + ["--set", "epochs=2"]) == 0
    assert "embed.class_token" in load_weights(weights)
    assert [json.loads(line)["epoch"] for line in log.read_text().splitlines()] == [1, 2]

    report = tmp_path / "report.json"
    predictions = tmp_path / "predictions.csv"
    confusion = tmp_path / "confusion.csv"
    arguments = [
        "evaluate",
        *common,
        "--flow-dir",
        str(flow_dir),
        "--report",
        str(report),
        "--weights",
        str(weights),
        "--predictions",
        str(predictions),
        "--confusion-csv",
        str(confusion),
        "--set",
        "epochs=1",
    ]
    assert main(arguments) == 0
    content = json.loads(report.read_text())
    assert content["protocol"] == "sde"
    assert content["label_set"] == ["dir0", "dir180"]
    assert len(content["folds"]) == 2
    assert content["pooled"]["samples"] == 4
    assert len(predictions.read_text().splitlines()) == 5
    assert confusion.read_text().startswith("true,dir0,dir180")
