"""
Frames-per-second measurement.
"""

import pytest

from src.evaluation.benchmark import frames_per_second, measure_fps
from src.tracker.inference import SequenceTracker
from src.tracker.network import TrackerNet
from src.frames.loader import save_sequence

from tests.conftest import random_sequence


def test_frames_per_second():
    assert frames_per_second(100, 0.5) == pytest.approx(200.0)
    assert frames_per_second(100, 0.0) is None


def test_model_rate_not_below_end_to_end(tmp_path, tiny_config):
    save_sequence(random_sequence(8, seed=1), tmp_path)
    report = measure_fps(SequenceTracker(TrackerNet(tiny_config)), tmp_path)
    assert report.frames == 8
    assert report.model_seconds <= report.end_to_end_seconds
    if report.model_fps is not None and report.end_to_end_fps is not None:
        assert report.model_fps >= report.end_to_end_fps


def test_repeat_runs_same_detections(tiny_config):
    seq = random_sequence(6, seed=3)
    tracker = SequenceTracker(TrackerNet(tiny_config), threshold=0.3)
    first = measure_fps(tracker, seq)
    second = measure_fps(tracker, seq, warmup=False)
    assert first.detections == second.detections
