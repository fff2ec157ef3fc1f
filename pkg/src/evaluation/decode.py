"""
Heatmap decoding: threshold, 4-connected component of the peak, weighted centroid.
"""

from typing import Tuple

import numpy as np
from scipy import ndimage

from .models import Detection

DEFAULT_THRESHOLD = 0.5

# 4-connectivity
_CROSS = ndimage.generate_binary_structure(2, 1)


def decode_heatmap(h: np.ndarray, threshold: float = DEFAULT_THRESHOLD, frame_index: int = 0) -> Detection:
    """
    Turn one heatmap into a detection.

    If the peak is below `threshold` the ball is absent. Otherwise the
    position is the intensity-weighted centroid of the 4-connected component
    of above-threshold pixels that contains the peak.

    Args:
        h: (H, W) heatmap
        threshold: Detection threshold in (0, 1)
        frame_index: Frame id for the returned detection

    Returns:
        Detection (x = column, y = row, confidence = peak value)
    """
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2:
        raise ValueError(f"Heatmap must be 2-D, got shape {h.shape}")
    flat_peak = int(np.argmax(h))
    peak = float(h.flat[flat_peak])
    if peak < threshold:
        return Detection.absent(frame_index)

    components, _ = ndimage.label(h >= threshold, structure=_CROSS)
    py, px = np.unravel_index(flat_peak, h.shape)
    rows, cols = np.nonzero(components == components[py, px])
    weights = h[rows, cols]
    x = float(np.sum(weights * cols) / np.sum(weights))
    y = float(np.sum(weights * rows) / np.sum(weights))
    return Detection(
        frame_index=frame_index,
        present=True,
        x=x,
        y=y,
        confidence=min(max(peak, 0.0), 1.0),
    )


def rescale_detection(det: Detection, from_size: Tuple[int, int], to_size: Tuple[int, int]) -> Detection:
    """Map detection coordinates from one (width, height) resolution to another."""
    if not det.present or from_size == to_size:
        return det
    sx = to_size[0] / from_size[0]
    sy = to_size[1] / from_size[1]
    return det.model_copy(update={"x": (det.x + 0.5) * sx - 0.5, "y": (det.y + 0.5) * sy - 0.5})
