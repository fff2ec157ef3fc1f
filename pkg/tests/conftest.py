"""
Shared fixtures: tiny synthetic clips, toy network configs, split manifests.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.evaluation.models import SplitEntry
from src.frames.blocks import make_blocks
from src.frames.models import Frame, FrameSequence
from src.synth.generator import generate_sequence, write_clip
from src.synth.models import SynthConfig
from src.tracker.config import FusionMode, NetworkConfig

# Per-game frame counts chosen so the tennis protocol trains on 14045 of 19835 frames
TENNIS_GAME_FRAMES = {
    "game1": 1900,
    "game2": 1950,
    "game3": 2050,
    "game4": 1950,
    "game5": 2100,
    "game6": 2010,
    "game7": 2000,
    "game8": 1950,
    "game9": 1940,
    "game10": 1985,
}


def make_sequence(arrays, start=1) -> FrameSequence:
    frames = [Frame(data=a) for a in arrays]
    return FrameSequence(frames=frames, frame_indices=list(range(start, start + len(frames))))


def random_sequence(n_frames=6, height=16, width=16, seed=0) -> FrameSequence:
    rng = np.random.default_rng(seed)
    return make_sequence(rng.random((n_frames, height, width, 3)))


@pytest.fixture
def tiny_config():
    """16x16 input, 2 levels, 2 base channels, v1 fusion."""
    return NetworkConfig(
        t_prime=3,
        input_width=16,
        input_height=16,
        base_channels=2,
        levels=2,
        fusion_mode=FusionMode.V1,
    )


@pytest.fixture
def tiny_block():
    return make_blocks(random_sequence(3, seed=7), 3)[0]


@pytest.fixture
def small_synth_config():
    return SynthConfig(width=32, height=16, n_frames=12, ball_radius=1, speed_min=1.0, speed_max=3.0, seed=3)


@pytest.fixture
def synth_clip(small_synth_config):
    return generate_sequence(small_synth_config)


@pytest.fixture
def clip_dir(tmp_path, synth_clip):
    seq, labels = synth_clip
    return write_clip(seq, labels, tmp_path / "clip")


@pytest.fixture
def tennis_manifest():
    """Two clips per game, mirroring the game-level tennis protocol totals."""
    entries = []
    for game, frames in TENNIS_GAME_FRAMES.items():
        first = frames // 2
        entries.append(SplitEntry(game_id=game, clip_id="clip1", frame_count=first))
        entries.append(SplitEntry(game_id=game, clip_id="clip2", frame_count=frames - first))
    return entries
