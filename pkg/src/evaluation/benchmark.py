"""
Throughput measurement: network-only and end-to-end frames per second.
"""

import logging
import time
from pathlib import Path
from typing import List, Optional, Protocol, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from .models import Detection
from ..frames.models import FrameSequence

logger = logging.getLogger(__name__)


class TrackingPipeline(Protocol):
    """The staged interface `measure_fps` times (see SequenceTracker)."""

    def load(self, source: Union[str, Path, FrameSequence]) -> FrameSequence: ...

    def prepare(self, seq: FrameSequence) -> FrameSequence: ...

    def predict(self, seq: FrameSequence) -> np.ndarray: ...

    def decode(self, heatmaps: np.ndarray, seq: FrameSequence, original_size: Tuple[int, int]) -> List[Detection]: ...


class FpsReport(BaseModel):
    """Timing of one benchmark run; detections let two runs be compared."""

    frames: int = Field(..., ge=0)
    model_seconds: float = Field(..., ge=0, description="Network forward passes only")
    end_to_end_seconds: float = Field(..., ge=0, description="Load, resize, predict and decode")
    model_fps: Optional[float] = Field(None, description="frames / model_seconds")
    end_to_end_fps: Optional[float] = Field(None, description="frames / end_to_end_seconds")
    detections: List[Detection] = Field(default_factory=list)


def frames_per_second(n_frames: int, seconds: float) -> Optional[float]:
    """n / seconds; None when no time elapsed."""
    if seconds <= 0:
        return None
    return n_frames / seconds


def measure_fps(
    pipeline: TrackingPipeline,
    source: Union[str, Path, FrameSequence],
    warmup: bool = True,
) -> FpsReport:
    """
    Time one tracking pass over a clip.

    A discarded prediction pass runs first when `warmup` is set. The model
    timer wraps only `predict`, which is part of the end-to-end span, so the
    model-only rate is never below the end-to-end rate.

    Args:
        pipeline: Staged tracker
        source: Clip directory or sequence (a directory makes end-to-end include I/O)
        warmup: Run one untimed pass first

    Returns:
        FpsReport with both rates and the detections
    """
    if warmup:
        pipeline.predict(pipeline.prepare(pipeline.load(source)))

    start = time.perf_counter()
    original = pipeline.load(source)
    seq = pipeline.prepare(original)
    model_start = time.perf_counter()
    heatmaps = pipeline.predict(seq)
    model_seconds = time.perf_counter() - model_start
    detections = pipeline.decode(heatmaps, seq, (original.width, original.height))
    total_seconds = time.perf_counter() - start

    n = len(detections)
    report = FpsReport(
        frames=n,
        model_seconds=model_seconds,
        end_to_end_seconds=total_seconds,
        model_fps=frames_per_second(n, model_seconds),
        end_to_end_fps=frames_per_second(n, total_seconds),
        detections=detections,
    )
    logger.info(
        f"{n} frames: model {report.model_fps or float('inf'):.1f} FPS, "
        f"end-to-end {report.end_to_end_fps or float('inf'):.1f} FPS"
    )
    return report
