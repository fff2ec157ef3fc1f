"""
Frame ingestion, grayscale conversion and temporal block slicing.
"""

from .models import Frame, FrameSequence, TemporalBlock
from .loader import load_sequence, save_sequence, to_gray, resize_frame
from .blocks import make_blocks

__all__ = [
    "Frame",
    "FrameSequence",
    "TemporalBlock",
    "load_sequence",
    "save_sequence",
    "to_gray",
    "resize_frame",
    "make_blocks",
]
