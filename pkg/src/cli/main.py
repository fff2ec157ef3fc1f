"""
Command-line front end: `synth`, `train`, `track`, `eval`, `visualize`,
`bench` and `simcheck`.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical abort.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import torch
from pydantic import ValidationError

from . import commands
from ..config.settings import RESOLVED_CONFIG_NAME, get_settings, load_run_config
from ..errors import ConfigError, FrameDataError, NumericalAbortError, ShapeMismatchError
from ..tracker.training import FINETUNE_LR
from ..utils.io import write_text_atomic
from ..utils.logging_setup import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracknet",
        description="Motion-prompted heatmap tracking of small fast balls",
    )
    parser.add_argument("--config", type=Path, help="RunConfig file (key = value lines)")
    parser.add_argument("--seed", type=int, help="Override the config seed")
    parser.add_argument("--out", type=Path, default=Path("output"), help="Output directory")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="Generate a synthetic dataset into --out")
    p.set_defaults(handler=commands.cmd_synth)

    p = sub.add_parser("train", help="Train a model on a dataset directory")
    p.add_argument("data_dir", type=Path, help="Clip directory or dataset with manifest.csv")
    p.add_argument("--model-out", type=Path, help="Model path (default <out>/model.mtrk)")
    p.add_argument("--init", type=Path, help="Start from this model file")
    p.add_argument("--finetune", action="store_true", help="Fine-tune --init with a small lr")
    p.add_argument("--split", choices=["all", "train", "test"], default="all",
                   help="Manifest clips to use")
    p.set_defaults(handler=commands.cmd_train)

    p = sub.add_parser("track", help="Write predictions.csv for a clip")
    p.add_argument("model", type=Path)
    p.add_argument("frames_dir", type=Path)
    p.add_argument("--output-csv", type=Path, help="Default <out>/predictions.csv")
    p.add_argument("--threshold", type=float, help="Decode threshold")
    p.add_argument("--overlap", choices=["last", "max"], help="Block overlap policy")
    p.add_argument("--resize", action="store_true", default=None,
                   help="Resize frames to the network input size")
    p.set_defaults(handler=commands.cmd_track)

    p = sub.add_parser("eval", help="Score predictions.csv against labels.csv")
    p.add_argument("predictions", type=Path)
    p.add_argument("labels", type=Path)
    p.add_argument("--tol", type=float, help="TP tolerance in pixels (default 4)")
    p.add_argument("--json", type=Path, help="Report path (default <out>/metrics.json)")
    p.set_defaults(handler=commands.cmd_eval)

    p = sub.add_parser("visualize", help="Write overlay images into --out")
    p.add_argument("frames_dir", type=Path)
    p.add_argument(
        "--model",
        type=Path,
        help="Required for heatmap and trajectory modes. Attention and prompted modes use its "
        "learned PN curve; without it they use the untrained one (slope 5, shift 0.25), "
        "so static pixels render at about 0.22 rather than black",
    )
    p.add_argument("--mode", choices=["attention", "prompted", "heatmap", "trajectory"],
                   default="attention")
    p.add_argument("--threshold", type=float, help="Decode threshold (trajectory mode)")
    p.add_argument("--resize", action="store_true", default=None)
    p.set_defaults(handler=commands.cmd_visualize)

    p = sub.add_parser("bench", help="Measure model-only and end-to-end FPS")
    p.add_argument("model", type=Path)
    p.add_argument("frames_dir", type=Path)
    p.add_argument("--resize", action="store_true", default=None)
    p.set_defaults(handler=commands.cmd_bench)

    p = sub.add_parser("simcheck", help="Per-layer cosine similarity of two models")
    p.add_argument("model_a", type=Path)
    p.add_argument("model_b", type=Path)
    p.add_argument("--plot", type=Path, help="Also save a bar chart PNG")
    p.set_defaults(handler=commands.cmd_simcheck)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    names = ("seed", "threshold", "overlap", "resize", "tol")
    overrides = {name: getattr(args, name, None) for name in names}
    if getattr(args, "finetune", False):
        overrides["lr"] = FINETUNE_LR
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    settings = get_settings()
    setup_logging(args.log_level or settings.log_level)
    torch.set_num_threads(settings.num_threads)

    try:
        config = load_run_config(args.config).with_overrides(_overrides(args))
        args.out.mkdir(parents=True, exist_ok=True)
        write_text_atomic(args.out / RESOLVED_CONFIG_NAME, config.to_text())
        return args.handler(args, config)
    except (ConfigError, commands.UsageError) as e:
        return _fail(e, EXIT_USAGE)
    except NumericalAbortError as e:
        return _fail(e, EXIT_NUMERICAL)
    except (FrameDataError, ShapeMismatchError, ValidationError, ValueError, OSError) as e:
        return _fail(e, EXIT_DATA)


def _fail(error: Exception, code: int) -> int:
    logger.error(f"{type(error).__name__}: {error}")
    print(f"error: {error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
