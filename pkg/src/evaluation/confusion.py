"""
Per-frame outcome classification, aggregation and the summary metrics.
"""

import logging
import math
from collections import Counter
from typing import Iterable, List, Optional, Sequence

from .models import ConfusionCounts, Detection, MetricsReport, Outcome
from ..errors import FrameDataError
from ..synth.models import BallLabel

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 4.0


def classify_frame(det: Detection, label: BallLabel, tol: float = DEFAULT_TOLERANCE) -> Outcome:
    """
    Classify one frame; a distance of exactly `tol` still counts as TP.

    Raises:
        FrameDataError: If detection and label refer to different frames
    """
    if det.frame_index != label.frame_index:
        raise FrameDataError(
            f"Detection frame {det.frame_index} does not match label frame {label.frame_index}"
        )
    if label.visible:
        if not det.present:
            return Outcome.FN
        dist = math.hypot(det.x - label.x, det.y - label.y)
        return Outcome.TP if dist <= tol else Outcome.FP1
    return Outcome.FP2 if det.present else Outcome.TN


def aggregate(outcomes: Iterable[Outcome]) -> ConfusionCounts:
    """
    Count outcomes per category.

    Raises:
        ValueError: If there are no outcomes
    """
    counter = Counter(Outcome(o) for o in outcomes)
    total = sum(counter.values())
    if total == 0:
        raise ValueError("Cannot aggregate an empty outcome list")
    return ConfusionCounts(
        tp=counter[Outcome.TP],
        tn=counter[Outcome.TN],
        fp1=counter[Outcome.FP1],
        fp2=counter[Outcome.FP2],
        fn=counter[Outcome.FN],
        total=total,
    )


def _percent(numerator: int, denominator: int) -> Optional[float]:
    return 100.0 * numerator / denominator if denominator else None


def metrics(c: ConfusionCounts) -> MetricsReport:
    """
    Accuracy, precision, recall and F1 in percent.

    Precision counts both false-positive kinds. A zero denominator leaves the
    metric undefined (None), which is distinct from 0.
    """
    accuracy = _percent(c.tp + c.tn, c.total)
    precision = _percent(c.tp, c.tp + c.fp1 + c.fp2)
    recall = _percent(c.tp, c.tp + c.fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricsReport(accuracy=accuracy, precision=precision, recall=recall, f1=f1)


def match_frames(detections: Sequence[Detection], labels: Sequence[BallLabel]) -> List[tuple]:
    """
    Pair detections and labels by frame index.

    Raises:
        FrameDataError: If the frame sets differ (the message lists missing frames)
    """
    by_frame = {d.frame_index: d for d in detections}
    label_frames = {label.frame_index for label in labels}
    missing_predictions = sorted(label_frames - set(by_frame))
    missing_labels = sorted(set(by_frame) - label_frames)
    if not label_frames & set(by_frame):
        raise FrameDataError("Predictions and labels share no frame indices")
    if missing_predictions or missing_labels:
        raise FrameDataError(
            f"Frame index mismatch: no prediction for {_preview(missing_predictions)}, "
            f"no label for {_preview(missing_labels)}"
        )
    return [(by_frame[label.frame_index], label) for label in labels]


def _preview(frames: List[int], limit: int = 10) -> str:
    if not frames:
        return "[]"
    shown = ", ".join(str(f) for f in frames[:limit])
    more = f", ... (+{len(frames) - limit})" if len(frames) > limit else ""
    return f"[{shown}{more}]"


def evaluate(detections: Sequence[Detection], labels: Sequence[BallLabel], tol: float = DEFAULT_TOLERANCE) -> ConfusionCounts:
    """Classify every labeled frame and aggregate the outcomes."""
    pairs = match_frames(detections, labels)
    counts = aggregate(classify_frame(det, label, tol) for det, label in pairs)
    logger.info(f"Evaluated {counts.total} frames at tolerance {tol}px")
    return counts
