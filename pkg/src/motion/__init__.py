"""
Frame differencing and the two-parameter motion prompt layer.
"""

from .prompt import (
    AttentionStack,
    DiffStack,
    MotionPromptLayer,
    PNParams,
    attention,
    frame_diff,
    pn_forward,
    pn_grad,
    prompted_frames,
)

__all__ = [
    "AttentionStack",
    "DiffStack",
    "MotionPromptLayer",
    "PNParams",
    "attention",
    "frame_diff",
    "pn_forward",
    "pn_grad",
    "prompted_frames",
]
