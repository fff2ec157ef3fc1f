"""
Exception types shared across the tracker packages.
The CLI maps each of them to a process exit code.
"""

from typing import Optional


class FrameDataError(ValueError):
    """Input frames, labels or predictions on disk are missing or inconsistent."""


class ShapeMismatchError(ValueError):
    """Tensor shapes do not satisfy a block/network/fusion contract."""


class ConfigError(ValueError):
    """A run configuration key or value is unknown or malformed."""


class NumericalAbortError(RuntimeError):
    """
    Training produced a non-finite loss.

    Attributes:
        epoch: Epoch index (1-based) where the loss went non-finite
        batch: Batch index (1-based) inside that epoch
    """

    def __init__(self, message: str, epoch: Optional[int] = None, batch: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
