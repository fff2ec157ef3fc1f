"""
Overlay rendering for the `visualize` command. All functions return float
RGB arrays in [0, 1]; writing is left to the caller.
"""

from typing import List, Sequence, Tuple

import cv2
import numpy as np

from ..evaluation.models import Detection
from ..frames.blocks import make_blocks
from ..frames.models import FrameSequence
from ..motion.prompt import PNParams, attention, frame_diff, prompted_frames

TRAJECTORY_RGB = (1.0, 0.1, 0.1)
HEATMAP_ALPHA = 0.5


def attention_images(seq: FrameSequence, params: PNParams) -> List[Tuple[int, np.ndarray]]:
    """
    Motion attention of each consecutive frame pair as a gray image.

    Returns:
        (frame id of the later frame, (H, W, 3) image) pairs
    """
    out = []
    for block in make_blocks(seq, 2):
        maps = attention(frame_diff(block), params).maps[0]
        out.append((block.frame_indices[1], np.repeat(maps[:, :, None], 3, axis=2)))
    return out


def prompted_images(seq: FrameSequence, params: PNParams) -> List[Tuple[int, np.ndarray]]:
    """Attention times the later RGB frame of each consecutive pair."""
    out = []
    for block in make_blocks(seq, 2):
        attn = attention(frame_diff(block), params)
        out.append((block.frame_indices[1], prompted_frames(block, attn)[0]))
    return out


def heatmap_overlay(frame_rgb: np.ndarray, heatmap: np.ndarray, alpha: float = HEATMAP_ALPHA) -> np.ndarray:
    """Blend a JET color-mapped heatmap over a frame of the same size."""
    heat8 = np.rint(np.clip(heatmap, 0.0, 1.0) * 255.0).astype(np.uint8)
    colored = cv2.applyColorMap(heat8, cv2.COLORMAP_JET)
    colored = cv2.cvtColor(colored, cv2.COLOR_BGR2RGB).astype(np.float64) / 255.0
    return np.clip((1.0 - alpha) * frame_rgb + alpha * colored, 0.0, 1.0)


def draw_trajectory(frame_rgb: np.ndarray, detections: Sequence[Detection], radius: int = 2) -> np.ndarray:
    """Draw every detected center (and the path through them) over a frame."""
    canvas = np.ascontiguousarray(frame_rgb, dtype=np.float32).copy()
    points = [
        (int(round(d.x)), int(round(d.y)))
        for d in detections
        if d.present
    ]
    for a, b in zip(points, points[1:]):
        cv2.line(canvas, a, b, TRAJECTORY_RGB, 1)
    for p in points:
        cv2.circle(canvas, p, radius, TRAJECTORY_RGB, -1)
    return np.clip(canvas.astype(np.float64), 0.0, 1.0)


def trajectory_points(detections: Sequence[Detection]) -> np.ndarray:
    """(N, 2) array of detected (x, y) centers."""
    return np.array([(d.x, d.y) for d in detections if d.present], dtype=np.float64).reshape(-1, 2)
