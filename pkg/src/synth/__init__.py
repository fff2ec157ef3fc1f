"""
Synthetic fast-ball clip generation, labels and ground-truth heatmaps.
"""

from .models import BackgroundMode, BallLabel, SynthConfig, scale_label
from .labels import read_labels, write_labels
from .generator import generate_sequence, render_gt_heatmap, write_clip, write_dataset

__all__ = [
    "BackgroundMode",
    "BallLabel",
    "SynthConfig",
    "scale_label",
    "read_labels",
    "write_labels",
    "generate_sequence",
    "render_gt_heatmap",
    "write_clip",
    "write_dataset",
]
