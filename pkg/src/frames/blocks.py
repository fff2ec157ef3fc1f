"""
Temporal block slicing (stride 1, T' frames per block).
"""

import logging
from typing import List

import numpy as np

from .loader import rgb_to_luma
from .models import FrameSequence, TemporalBlock
from ..errors import FrameDataError

logger = logging.getLogger(__name__)


def make_blocks(seq: FrameSequence, t_prime: int) -> List[TemporalBlock]:
    """
    Slice a sequence into overlapping temporal blocks.

    Block t covers frames t .. t + T' - 1, so a sequence of T frames yields
    exactly T - T' + 1 blocks. The gray view is the luma of the RGB view.

    Args:
        seq: Input frames (resized to network resolution already)
        t_prime: Frames per block, at least 2

    Returns:
        List of TemporalBlock in temporal order

    Raises:
        ValueError: If t_prime < 2
        FrameDataError: If the sequence is shorter than one block
    """
    if t_prime < 2:
        raise ValueError(f"T' must be at least 2, got {t_prime}")
    total = len(seq)
    if total < t_prime:
        raise FrameDataError(f"sequence shorter than block: {total} frames < T'={t_prime}")

    rgb = np.stack([f.as_rgb() for f in seq.frames], axis=0)
    gray = rgb_to_luma(rgb)

    blocks = []
    for t in range(total - t_prime + 1):
        blocks.append(
            TemporalBlock(
                rgb=rgb[t:t + t_prime],
                gray=gray[t:t + t_prime],
                start_index=seq.frame_indices[t],
                frame_indices=seq.frame_indices[t:t + t_prime],
            )
        )

    logger.debug(f"Built {len(blocks)} blocks of T'={t_prime} from {total} frames")
    return blocks
