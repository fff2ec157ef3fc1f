"""
Whole-sequence tracking: blocks -> heatmaps -> one detection per frame.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .models import ModelWeights
from .network import TrackerNet, as_model, predict_heatmap_batch
from ..errors import ShapeMismatchError
from ..evaluation.decode import DEFAULT_THRESHOLD, decode_heatmap, rescale_detection
from ..evaluation.models import Detection
from ..frames.blocks import make_blocks
from ..frames.loader import load_sequence, resize_frame
from ..frames.models import FrameSequence

logger = logging.getLogger(__name__)


class OverlapPolicy(str, Enum):
    """How the up-to-T' heatmaps a frame receives are reduced to one."""

    LAST = "last"  # block where the frame sits in the last slot, earlier slots at the start
    MAX = "max"  # per-pixel maximum over all blocks covering the frame


def resolve_overlap(block_heatmaps: np.ndarray, policy: OverlapPolicy = OverlapPolicy.LAST) -> np.ndarray:
    """
    Reduce stride-1 block predictions to one heatmap per frame.

    Args:
        block_heatmaps: (B, T', H, W) predictions of consecutive blocks
        policy: Overlap policy

    Returns:
        (B + T' - 1, H, W) per-frame heatmaps
    """
    n_blocks, t_prime = block_heatmaps.shape[:2]
    n_frames = n_blocks + t_prime - 1
    policy = OverlapPolicy(policy)
    frames = []
    for p in range(n_frames):
        if policy == OverlapPolicy.LAST:
            slot = min(p, t_prime - 1)
            frames.append(block_heatmaps[p - slot, slot])
        else:
            first = max(0, p - t_prime + 1)
            last = min(p, n_blocks - 1)
            covering = [block_heatmaps[b, p - b] for b in range(first, last + 1)]
            frames.append(np.max(np.stack(covering, axis=0), axis=0))
    return np.stack(frames, axis=0)


class SequenceTracker:
    """
    Runs a trained tracker over clips.

    The three stages (load, predict, decode) are separate methods so that the
    benchmark can time the network alone.
    """

    def __init__(
        self,
        model: Union[TrackerNet, ModelWeights],
        threshold: float = DEFAULT_THRESHOLD,
        overlap: OverlapPolicy = OverlapPolicy.LAST,
        resize: bool = False,
        batch_size: int = 8,
    ):
        self.model = as_model(model)
        self.model.eval()
        self.threshold = threshold
        self.overlap = OverlapPolicy(overlap)
        self.resize = resize
        self.batch_size = batch_size

    @property
    def network_size(self) -> Tuple[int, int]:
        return self.model.config.size

    def load(self, source: Union[str, Path, FrameSequence]) -> FrameSequence:
        """Load (or accept) a sequence at its original resolution."""
        if isinstance(source, FrameSequence):
            return source
        return load_sequence(source)

    def prepare(self, seq: FrameSequence) -> FrameSequence:
        """
        Bring a sequence to network resolution.

        Raises:
            ShapeMismatchError: Sizes differ and resizing is disabled
        """
        width, height = self.network_size
        if (seq.width, seq.height) == (width, height):
            return seq
        if not self.resize:
            raise ShapeMismatchError(
                f"Frames are {seq.width}x{seq.height} but the model expects {width}x{height}; "
                f"enable resizing to track them"
            )
        return FrameSequence(
            frames=[resize_frame(f, width, height) for f in seq.frames],
            frame_indices=seq.frame_indices,
            fps_hint=seq.fps_hint,
        )

    def predict(self, seq: FrameSequence) -> np.ndarray:
        """(T, H, W) heatmaps, one per frame, at network resolution."""
        blocks = make_blocks(seq, self.model.config.t_prime)
        block_maps = predict_heatmap_batch(self.model, blocks, batch_size=self.batch_size)
        return resolve_overlap(block_maps, self.overlap)

    def decode(self, heatmaps: np.ndarray, seq: FrameSequence, original_size: Tuple[int, int]) -> List[Detection]:
        """Decode per-frame heatmaps and map coordinates to `original_size`."""
        return [
            rescale_detection(
                decode_heatmap(heat, self.threshold, frame_index=idx),
                (seq.width, seq.height),
                original_size,
            )
            for heat, idx in zip(heatmaps, seq.frame_indices)
        ]

    def track(self, source: Union[str, Path, FrameSequence]) -> List[Detection]:
        original = self.load(source)
        seq = self.prepare(original)
        detections = self.decode(self.predict(seq), seq, (original.width, original.height))
        found = sum(d.present for d in detections)
        logger.info(f"Tracked {len(detections)} frames, ball detected in {found}")
        return detections


def track_sequence(
    model: Union[TrackerNet, ModelWeights],
    source: Union[str, Path, FrameSequence],
    threshold: float = DEFAULT_THRESHOLD,
    overlap: OverlapPolicy = OverlapPolicy.LAST,
    resize: bool = False,
    batch_size: int = 8,
) -> List[Detection]:
    """
    Track the ball through a clip.

    Args:
        model: Trained network or its weights
        source: Clip directory or an in-memory sequence
        threshold: Decode threshold
        overlap: Overlap policy for frames covered by several blocks
        resize: Resize frames whose size differs from the network input
        batch_size: Blocks per forward pass

    Returns:
        One Detection per frame, coordinates at the clip's own resolution
    """
    tracker = SequenceTracker(model, threshold=threshold, overlap=overlap, resize=resize, batch_size=batch_size)
    return tracker.track(source)


def track_to_heatmaps(
    model: Union[TrackerNet, ModelWeights],
    seq: FrameSequence,
    overlap: OverlapPolicy = OverlapPolicy.LAST,
    resize: bool = False,
) -> Tuple[FrameSequence, np.ndarray]:
    """Per-frame heatmaps with the network-resolution sequence they belong to."""
    tracker = SequenceTracker(model, overlap=overlap, resize=resize)
    prepared = tracker.prepare(seq)
    return prepared, tracker.predict(prepared)
