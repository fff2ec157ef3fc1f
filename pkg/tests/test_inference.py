"""
Sequence tracking: overlap resolution, resizing and the staged tracker.
"""

import numpy as np
import pytest

from src.errors import ShapeMismatchError
from src.tracker.inference import (
    OverlapPolicy,
    SequenceTracker,
    resolve_overlap,
    track_sequence,
    track_to_heatmaps,
)
from src.tracker.network import TrackerNet

from tests.conftest import random_sequence


def _tagged_blocks(n_blocks, t_prime):
    """block b, slot s filled with the value 10 b + s."""
    maps = np.zeros((n_blocks, t_prime, 2, 2))
    for b in range(n_blocks):
        for s in range(t_prime):
            maps[b, s] = 10 * b + s
    return maps


def test_last_slot_policy_covers_every_frame():
    out = resolve_overlap(_tagged_blocks(8, 3), OverlapPolicy.LAST)
    assert out.shape == (10, 2, 2)
    # frames 0 and 1 come from the first block, then each frame from the block ending on it
    assert [out[p, 0, 0] for p in range(10)] == [0, 1] + [10 * (p - 2) + 2 for p in range(2, 10)]


def test_max_policy():
    maps = _tagged_blocks(4, 3)
    out = resolve_overlap(maps, "max")
    assert out.shape == (6, 2, 2)
    assert out[0, 0, 0] == 0
    assert out[2, 0, 0] == 20
    assert out[5, 0, 0] == 32


def test_tracker_one_detection_per_frame(tiny_config):
    seq = random_sequence(10, seed=4)
    detections = track_sequence(TrackerNet(tiny_config), seq)
    assert [d.frame_index for d in detections] == seq.frame_indices


def test_size_mismatch_without_resize(tiny_config):
    seq = random_sequence(4, height=24, width=32)
    with pytest.raises(ShapeMismatchError, match="resiz"):
        track_sequence(TrackerNet(tiny_config), seq)


def test_resize_maps_back_to_clip_resolution(tiny_config):
    seq = random_sequence(4, height=24, width=32)
    tracker = SequenceTracker(TrackerNet(tiny_config), threshold=1e-6, resize=True)
    detections = tracker.track(seq)
    present = [d for d in detections if d.present]
    assert present
    for d in present:
        assert -0.5 <= d.x <= 31.5
        assert -0.5 <= d.y <= 23.5


def test_track_to_heatmaps_shapes(tiny_config):
    seq = random_sequence(5, seed=2)
    prepared, heatmaps = track_to_heatmaps(TrackerNet(tiny_config), seq)
    assert prepared is seq
    assert heatmaps.shape == (5, 16, 16)
    assert np.all((heatmaps > 0) & (heatmaps < 1))


def test_track_from_directory(tmp_path, tiny_config):
    from src.frames.loader import save_sequence

    save_sequence(random_sequence(4, seed=9), tmp_path)
    detections = track_sequence(TrackerNet(tiny_config), tmp_path)
    assert [d.frame_index for d in detections] == [1, 2, 3, 4]
