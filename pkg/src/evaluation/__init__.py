"""
Heatmap decoding, confusion taxonomy, metrics, split protocols, FPS timing
and the weight-similarity diagnostic.
"""

from .models import (
    Assignment,
    ConfusionCounts,
    Detection,
    MetricsReport,
    Outcome,
    SplitEntry,
    SplitManifest,
    round_half_up,
)
from .decode import decode_heatmap, rescale_detection
from .confusion import aggregate, classify_frame, evaluate, metrics
from .splits import TENNIS_TEST_GAMES, TENNIS_TRAIN_GAMES, split_clip_level, split_game_level
from .benchmark import FpsReport, frames_per_second, measure_fps

__all__ = [
    "Assignment",
    "ConfusionCounts",
    "Detection",
    "MetricsReport",
    "Outcome",
    "SplitEntry",
    "SplitManifest",
    "round_half_up",
    "decode_heatmap",
    "rescale_detection",
    "aggregate",
    "classify_frame",
    "evaluate",
    "metrics",
    "TENNIS_TEST_GAMES",
    "TENNIS_TRAIN_GAMES",
    "split_clip_level",
    "split_game_level",
    "FpsReport",
    "frames_per_second",
    "measure_fps",
]
