"""
Handlers for the tracker subcommands. Each takes the parsed arguments and the
resolved RunConfig and returns a process exit code.
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from .visualize import attention_images, draw_trajectory, heatmap_overlay, prompted_images
from ..config.settings import RunConfig
from ..errors import FrameDataError
from ..evaluation.benchmark import measure_fps
from ..evaluation.confusion import evaluate, metrics
from ..evaluation.io import (
    read_manifest,
    read_predictions,
    write_loss_log,
    write_metrics_json,
    write_predictions,
)
from ..evaluation.models import Assignment
from ..evaluation.similarity import plot_layer_similarity, weights_cosine_similarity
from ..frames.loader import FRAME_NAME_FORMAT, encode_png, load_sequence, resize_frame
from ..frames.models import FrameSequence
from ..motion.prompt import PNParams
from ..synth.generator import write_dataset
from ..synth.labels import read_labels
from ..tracker.inference import SequenceTracker, track_to_heatmaps
from ..tracker.models import ModelWeights
from ..tracker.network import TrackerNet
from ..tracker.serialization import load_model, save_model
from ..tracker.training import build_training_samples, train
from ..utils.io import write_bytes_atomic

logger = logging.getLogger(__name__)

console = Console()

MODEL_FILE_NAME = "model.mtrk"
LOSS_LOG_NAME = "loss_log.csv"
PREDICTIONS_NAME = "predictions.csv"
METRICS_NAME = "metrics.json"


class UsageError(ValueError):
    """Command-line arguments are inconsistent (exit code 2)."""


def _fmt(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.1f}"


def cmd_synth(args: argparse.Namespace, config: RunConfig) -> int:
    """Generate a synthetic dataset into --out."""
    out = Path(args.out)
    summary = write_dataset(config.synth_config(), out)

    table = Table(title=f"Synthetic dataset: {out}")
    for key in ("clips", "frames", "visible", "hidden"):
        table.add_column(key.capitalize(), justify="right")
    table.add_row(*(str(summary[k]) for k in ("clips", "frames", "visible", "hidden")))
    console.print(table)
    return 0


def _resize_sequence(seq: FrameSequence, size: Tuple[int, int]) -> FrameSequence:
    if (seq.width, seq.height) == size:
        return seq
    return FrameSequence(
        frames=[resize_frame(f, size[0], size[1]) for f in seq.frames],
        frame_indices=seq.frame_indices,
        fps_hint=seq.fps_hint,
    )


def clip_dirs(data_dir: Path, split: str = "all") -> List[Path]:
    """
    Clip directories of a dataset: the directory itself, or the manifest's
    clips filtered by assignment.
    """
    manifest_path = data_dir / "manifest.csv"
    if not manifest_path.is_file():
        if split != "all":
            raise UsageError(f"--split {split} needs a manifest.csv in {data_dir}")
        return [data_dir]
    manifest = read_manifest(manifest_path)
    entries = manifest.entries
    if split != "all":
        entries = [e for e in entries if e.assignment == Assignment(split)]
    if not entries:
        raise FrameDataError(f"No clips with assignment '{split}' in {manifest_path}")
    return [data_dir / e.clip_id for e in entries]


def load_training_set(data_dir: Path, config: RunConfig, split: str = "all") -> list:
    """Blocks and targets of every selected clip, at network resolution."""
    net = config.network_config()
    samples = []
    for clip in clip_dirs(data_dir, split):
        original = load_sequence(clip)
        seq = _resize_sequence(original, net.size)
        labels = read_labels(clip / "labels.csv")
        samples.extend(
            build_training_samples(
                seq,
                labels,
                net.t_prime,
                sigma_g=config.sigma_g,
                label_size=(original.width, original.height),
            )
        )
    logger.info(f"Training set: {len(samples)} blocks from {data_dir}")
    return samples


def cmd_train(args: argparse.Namespace, config: RunConfig) -> int:
    """Train (or fine-tune) a model and write it with its loss log."""
    if args.finetune and not args.init:
        raise UsageError("--finetune requires --init <model>")
    out = Path(args.out)
    init_weights: Optional[ModelWeights] = load_model(args.init) if args.init else None
    samples = load_training_set(Path(args.data_dir), config, args.split)
    hyper = config.hyper_params(init_weights=init_weights)
    result = train(samples, config.network_config(), hyper)

    model_path = Path(args.model_out) if args.model_out else out / MODEL_FILE_NAME
    save_model(result.weights, model_path)
    write_loss_log(result.loss_trace, out / LOSS_LOG_NAME)

    table = Table(title="Training")
    table.add_column("Epoch", justify="right")
    table.add_column("Loss", justify="right")
    for epoch, loss in result.loss_trace:
        table.add_row(str(epoch), f"{loss:.6f}")
    console.print(table)
    console.print(f"Model written to {model_path}")
    return 0


def _tracker(weights: ModelWeights, config: RunConfig) -> SequenceTracker:
    return SequenceTracker(
        weights,
        threshold=config.threshold,
        overlap=config.overlap,
        resize=config.resize,
    )


def cmd_track(args: argparse.Namespace, config: RunConfig) -> int:
    """Track a clip and write predictions.csv."""
    weights = load_model(args.model)
    detections = _tracker(weights, config).track(Path(args.frames_dir))
    out_csv = Path(args.output_csv) if args.output_csv else Path(args.out) / PREDICTIONS_NAME
    write_predictions(detections, out_csv)
    found = sum(d.present for d in detections)
    console.print(f"{len(detections)} frames tracked, ball found in {found}; wrote {out_csv}")
    return 0


def cmd_eval(args: argparse.Namespace, config: RunConfig) -> int:
    """Score predictions against labels and print the confusion/metrics row."""
    detections = read_predictions(args.predictions)
    labels = read_labels(args.labels)
    counts = evaluate(detections, labels, tol=config.tol)
    report = metrics(counts)
    rounded = report.rounded()

    table = Table(title=f"Evaluation (tolerance {config.tol:g}px)")
    for column in ("TP", "TN", "FP1", "FP2", "FN", "Total", "Acc.", "Prec.", "Rec.", "F1"):
        table.add_column(column, justify="right")
    table.add_row(
        *(str(v) for v in counts.as_row().values()),
        *(_fmt(rounded[k]) for k in ("accuracy", "precision", "recall", "f1")),
    )
    console.print(table)

    json_path = Path(args.json) if args.json else Path(args.out) / METRICS_NAME
    write_metrics_json(counts, report, json_path, tol=config.tol)
    return 0


def _write_images(images, out_dir: Path, prefix: str) -> int:
    for frame_id, image in images:
        write_bytes_atomic(out_dir / f"{prefix}_{FRAME_NAME_FORMAT.format(frame_id)}", encode_png(image))
    return len(images)


def cmd_visualize(args: argparse.Namespace, config: RunConfig) -> int:
    """Write attention, prompted, heatmap or trajectory overlays."""
    mode = args.mode
    if mode in ("heatmap", "trajectory") and not args.model:
        raise UsageError(f"--mode {mode} requires --model")
    out = Path(args.out)
    weights = load_model(args.model) if args.model else None
    seq = load_sequence(args.frames_dir)

    if mode in ("attention", "prompted"):
        params = PNParams()
        if weights is not None and weights.config.uses_motion:
            params = TrackerNet.from_weights(weights).motion_prompt.params
        else:
            logger.warning(f"No fusion model given; {mode} uses the untrained PN curve {params}")
        render = attention_images if mode == "attention" else prompted_images
        count = _write_images(render(seq, params), out, mode)
    elif mode == "heatmap":
        prepared, heatmaps = track_to_heatmaps(weights, seq, overlap=config.overlap, resize=config.resize)
        images = [
            (idx, heatmap_overlay(frame.as_rgb(), heat))
            for idx, frame, heat in zip(prepared.frame_indices, prepared.frames, heatmaps)
        ]
        count = _write_images(images, out, mode)
    else:
        detections = _tracker(weights, config).track(seq)
        canvas = draw_trajectory(seq.frames[-1].as_rgb(), detections)
        count = _write_images([(seq.frame_indices[-1], canvas)], out, mode)

    console.print(f"Wrote {count} {mode} image(s) to {out}")
    return 0


def cmd_bench(args: argparse.Namespace, config: RunConfig) -> int:
    """Report network-only and end-to-end FPS on a clip."""
    weights = load_model(args.model)
    report = measure_fps(_tracker(weights, config), Path(args.frames_dir))

    table = Table(title="Throughput")
    for column in ("Frames", "Detections", "Model FPS", "End-to-end FPS"):
        table.add_column(column, justify="right")
    table.add_row(
        str(report.frames),
        str(sum(d.present for d in report.detections)),
        _fmt(report.model_fps),
        _fmt(report.end_to_end_fps),
    )
    console.print(table)
    return 0


def cmd_simcheck(args: argparse.Namespace, config: RunConfig) -> int:
    """Per-layer cosine similarity between two model files."""
    sims = weights_cosine_similarity(load_model(args.model_a), load_model(args.model_b))

    table = Table(title="Per-layer weight similarity")
    table.add_column("Layer")
    table.add_column("Cosine", justify="right")
    for s in sims:
        table.add_row(s.name, f"{s.cosine:.4f}")
    console.print(table)
    if sims:
        console.print(f"mean {np.mean([s.cosine for s in sims]):.4f} over {len(sims)} layers")
    if args.plot:
        plot_layer_similarity(sims, args.plot)
    return 0
