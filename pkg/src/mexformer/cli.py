"""Command-line entry point: ``mexformer synth | preprocess | train | evaluate | metrics``"""

from __future__ import annotations

import json
import logging
import sys
import warnings
from argparse import ArgumentParser, Namespace
from typing import List, Optional, Sequence

from mexformer.dataset import SynthSpec, load_flow_samples, load_manifest, synth_generate
from mexformer.evaluation.protocol import apply_protocol, run_protocol
from mexformer.evaluation.report import load_predictions, metrics_report, write_predictions, write_report
from mexformer.inspection.visualize import plot_confusion_matrix, save_figure
from mexformer.io import file_io, paths
from mexformer.io.weight_file import load_weights, save_weights
from mexformer.model.network import init_weights
from mexformer.pipeline_config import PipelineConfig, load_pipeline_config
from mexformer.preprocess.pipeline import preprocess_manifest
from mexformer.training.trainer import train

logger = logging.getLogger("mexformer")

HANDLED_ERRORS = (ValueError, FileNotFoundError, OSError, RuntimeError, FloatingPointError)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="mexformer", description="Micro-expression recognition from long-term flow")
    parser.add_argument("--verbose", action="store_true", help="log debug detail")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate a synthetic dataset with a manifest")
    synth.add_argument("--output", required=True, help="dataset directory to create")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--subjects", type=int)
    synth.add_argument("--samples-per-subject", type=int)
    synth.add_argument("--directions", help="comma-separated motion direction of each class, degrees")
    synth.add_argument("--image-size", type=int)
    synth.add_argument("--frames", type=int)
    synth.add_argument("--peak", type=float, help="peak blob displacement in pixels")
    synth.add_argument("--noise", type=float, help="additive noise standard deviation")

    preprocess = commands.add_parser("preprocess", help="align, crop, interpolate, and compute flow")
    _add_manifest_and_config(preprocess)
    preprocess.add_argument("--output", required=True, help="directory for flow files")
    preprocess.add_argument("--visualize", action="store_true", help="also write colourised flow PNGs")

    train_parser = commands.add_parser("train", help="train one model on every retained sample")
    _add_manifest_and_config(train_parser)
    train_parser.add_argument("--flow-dir", required=True, help="preprocess output directory")
    train_parser.add_argument("--output", required=True, help="weight file to write")
    train_parser.add_argument("--log", help="line-delimited JSON training log to write")

    evaluate = commands.add_parser("evaluate", help="leave-one-subject-out evaluation under a protocol")
    _add_manifest_and_config(evaluate)
    evaluate.add_argument("--flow-dir", required=True, help="preprocess output directory")
    evaluate.add_argument("--report", required=True, help="JSON report to write")
    evaluate.add_argument("--weights", help="initial weights for every fold")
    evaluate.add_argument("--predictions", help="per-sample prediction CSV to write")
    evaluate.add_argument("--confusion-csv", help="pooled confusion matrix CSV to write")
    evaluate.add_argument("--plot", help="pooled confusion matrix PNG to write")

    metrics = commands.add_parser("metrics", help="score a prediction CSV")
    metrics.add_argument("--predictions", required=True, help="CSV with true and predicted columns")
    metrics.add_argument("--output", help="JSON file to write; printed when omitted")
    metrics.add_argument("--classes", help="comma-separated class order")
    metrics.add_argument("--plot", help="confusion matrix PNG to write")
    return parser


def _add_manifest_and_config(parser: ArgumentParser):
    parser.add_argument("--manifest", required=True, help="manifest CSV")
    parser.add_argument("--config", help="properties file of settings")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a setting"
    )


def _comma_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _config(args: Namespace) -> PipelineConfig:
    config = load_pipeline_config(args.config, args.overrides)
    logger.debug("settings:\n%s", config)
    return config


def _samples(args: Namespace, config: PipelineConfig):
    manifest = load_manifest(args.manifest)
    max_magnitude = "auto" if config.max_magnitude is None else config.max_magnitude
    return load_flow_samples(manifest, args.flow_dir, config.flow_input, max_magnitude)


def run_synth(args: Namespace) -> int:
    values = {
        "seed": args.seed,
        "subjects": args.subjects,
        "samples_per_subject": args.samples_per_subject,
        "image_size": args.image_size,
        "frames": args.frames,
        "peak_displacement": args.peak,
        "noise_std": args.noise,
    }
    if args.directions is not None:
        values["directions"] = [float(direction) for direction in _comma_list(args.directions)]
    spec = SynthSpec(**{key: value for key, value in values.items() if value is not None})
    manifest = synth_generate(spec, args.output)
    print(f"wrote {len(manifest)} samples to {paths.manifest_file(args.output)}")
    return 0


def run_preprocess(args: Namespace) -> int:
    config = _config(args)
    manifest = load_manifest(args.manifest)
    prepared = preprocess_manifest(
        manifest, args.output, config.preprocess_config(), visualize=args.visualize
    )
    config.to_properties_file(file_io.get_upath(args.output) / paths.CONFIG_FILENAME)
    print(f"preprocessed {len(prepared)} samples into {args.output}")
    return 0


def run_train(args: Namespace) -> int:
    config = _config(args)
    train_config = config.train_config()
    samples, class_names, _ = apply_protocol(_samples(args, config), config.protocol_spec())
    spec = config.model_spec(len(class_names))
    logger.info("training on %d samples over classes %s", len(samples), class_names)
    result = train(init_weights(spec, seed=train_config.seed), samples, train_config, spec, class_names)
    save_weights(result.weights, args.output)
    if args.log:
        result.write_log(args.log)
    final = result.log[-1] if result.log else None
    if final is None:
        print(f"wrote weights to {args.output}")
    else:
        print(
            f"wrote weights to {args.output}; "
            f"final loss {final.loss:.4f}, training accuracy {final.train_accuracy:.3f}"
        )
    return 0


def run_evaluate(args: Namespace) -> int:
    config = _config(args)
    train_config = config.train_config()
    protocol = config.protocol_spec()
    samples = _samples(args, config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, class_names, _ = apply_protocol(samples, protocol)
    spec = config.model_spec(len(class_names))
    initial_weights = load_weights(args.weights) if args.weights else None
    report = run_protocol(
        samples,
        protocol,
        train_config,
        spec,
        initial_weights=initial_weights,
        workers=config.workers,
    )
    content = write_report(report, args.report)
    if args.predictions:
        write_predictions(report, args.predictions)
    if args.confusion_csv:
        report.pooled.write_csv(args.confusion_csv)
    if args.plot:
        fig, _ = plot_confusion_matrix(report.pooled, title=f"{protocol.kind.value} pooled")
        save_figure(fig, args.plot)
    pooled = content["pooled"]
    print(f"{len(report.folds)} folds: UF1 {pooled['uf1']:.4f}, UAR {pooled['uar']:.4f}")
    return 0


def run_metrics(args: Namespace) -> int:
    class_names = _comma_list(args.classes) if args.classes else None
    cm = load_predictions(args.predictions, class_names)
    content = json.dumps(metrics_report(cm), indent=2) + "\n"
    if args.output:
        file_io.write_string_to_file(args.output, content)
    else:
        print(content, end="")
    if args.plot:
        fig, _ = plot_confusion_matrix(cm)
        save_figure(fig, args.plot)
    return 0


COMMANDS = {
    "synth": run_synth,
    "preprocess": run_preprocess,
    "train": run_train,
    "evaluate": run_evaluate,
    "metrics": run_metrics,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status.

    Failures print a one-line ``error: ...`` diagnostic to stderr and return 1.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except HANDLED_ERRORS as error:
        message = " ".join(str(error).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
