#!/usr/bin/env python3
"""
Motion fusion vs visual baseline on synthetic occluded clips.

Trains fusion_mode=off and fusion_mode=v1 from identical seeds, scores both
on a held-out occluded clip and reports whether v1 is at least as good as the
baseline in 2 of 3 seeds.

Usage:
    python scripts/run_motion_experiment.py [--epochs N] [--seeds 0 1 2] [--quick]
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from rich.console import Console
from rich.table import Table

from src.config.settings import get_settings
from src.evaluation.experiment import ExperimentSettings, motion_helps, run_experiment
from src.utils.logging_setup import setup_logging


def main():
    """Run the experiment and print the verdict."""
    parser = argparse.ArgumentParser(description="Motion fusion directional experiment")
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--train-frames", type=int, default=2000)
    parser.add_argument("--test-frames", type=int, default=500)
    parser.add_argument("--optimizer", choices=["sgd", "adadelta"], default="sgd")
    parser.add_argument("--lr", type=float, default=1.0)
    parser.add_argument("--quick", action="store_true", help="Tiny run for smoke testing")
    args = parser.parse_args()

    setup_logging(get_settings().log_level)
    settings = ExperimentSettings(
        seeds=args.seeds,
        epochs=2 if args.quick else args.epochs,
        train_frames=60 if args.quick else args.train_frames,
        test_frames=30 if args.quick else args.test_frames,
        optimizer=args.optimizer,
        lr=args.lr,
    )

    console = Console()
    console.print("[bold blue]" + "=" * 70)
    console.print("[bold blue]  Motion fusion (v1) vs visual baseline (off)")
    console.print("[bold blue]" + "=" * 70)

    results = run_experiment(settings)

    table = Table(title="F1 on occluded test clip")
    table.add_column("Seed", justify="right")
    table.add_column("off", justify="right")
    table.add_column("v1", justify="right")
    table.add_column("v1 >= off")
    for r in results:
        table.add_row(
            str(r.seed),
            "undefined" if r.baseline_f1 is None else f"{r.baseline_f1:.1f}",
            "undefined" if r.motion_f1 is None else f"{r.motion_f1:.1f}",
            "yes" if r.motion_wins else "no",
        )
    console.print(table)

    required = min(2, len(results))
    if motion_helps(results, required=required):
        console.print(f"[green]✓ v1 >= off in at least {required} of {len(results)} seeds[/green]")
    else:
        console.print(f"[red]✗ v1 >= off in fewer than {required} of {len(results)} seeds[/red]")
        sys.exit(1)


if __name__ == "__main__":
    main()
