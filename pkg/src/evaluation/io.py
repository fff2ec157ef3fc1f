"""
CSV/JSON readers and writers for predictions, split manifests, loss logs and
metrics reports. Every writer goes through an atomic temp-file rename.
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import pandas as pd

from .models import Assignment, ConfusionCounts, Detection, MetricsReport, SplitEntry, SplitManifest
from ..errors import FrameDataError
from ..synth.labels import format_coordinate
from ..utils.io import atomic_path, write_text_atomic

logger = logging.getLogger(__name__)

PREDICTION_COLUMNS = ["frame", "visibility", "x", "y", "confidence"]
MANIFEST_COLUMNS = ["game", "clip", "frames", "assignment"]
LOSS_COLUMNS = ["epoch", "loss"]


def _write_frame(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    with atomic_path(path) as tmp:
        df.to_csv(tmp, index=False, lineterminator="\n", encoding="utf-8")
    return Path(path)


def _read_frame(path: Union[str, Path], columns: List[str], **kwargs) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise FrameDataError(f"File not found: {path}")
    df = pd.read_csv(path, **kwargs)
    if list(df.columns) != columns:
        raise FrameDataError(f"{path.name}: expected header {','.join(columns)}")
    return df


def write_predictions(detections: Sequence[Detection], path: Union[str, Path]) -> Path:
    """Write predictions.csv; x/y/confidence are empty for absent detections."""
    df = pd.DataFrame(
        {
            "frame": [str(d.frame_index) for d in detections],
            "visibility": ["1" if d.present else "0" for d in detections],
            "x": [format_coordinate(round(d.x, 3)) if d.present else "" for d in detections],
            "y": [format_coordinate(round(d.y, 3)) if d.present else "" for d in detections],
            "confidence": [f"{d.confidence:.6f}" if d.present else "" for d in detections],
        },
        columns=PREDICTION_COLUMNS,
    )
    logger.info(f"Writing {len(detections)} predictions to {path}")
    return _write_frame(df, path)


def read_predictions(path: Union[str, Path]) -> List[Detection]:
    """
    Read predictions.csv back into detections.

    Raises:
        FrameDataError: Missing file, wrong header or an invalid row
    """
    df = _read_frame(path, PREDICTION_COLUMNS, dtype={"frame": "Int64", "visibility": "Int64"})
    detections = []
    for row in df.itertuples(index=False):
        try:
            present = int(row.visibility) == 1
            detections.append(
                Detection(
                    frame_index=int(row.frame),
                    present=present,
                    x=float(row.x) if present else None,
                    y=float(row.y) if present else None,
                    confidence=float(row.confidence) if present else None,
                )
            )
        except (ValueError, TypeError) as e:
            raise FrameDataError(f"{Path(path).name}: bad row for frame {row.frame}: {e}") from e
    return detections


def write_manifest(manifest: SplitManifest, path: Union[str, Path]) -> Path:
    df = pd.DataFrame(
        [
            (e.game_id, e.clip_id, str(e.frame_count), e.assignment.value if e.assignment else "")
            for e in manifest.entries
        ],
        columns=MANIFEST_COLUMNS,
    )
    return _write_frame(df, path)


def read_manifest(path: Union[str, Path]) -> SplitManifest:
    """Read a `game,clip,frames,assignment` manifest (assignment may be empty)."""
    df = _read_frame(path, MANIFEST_COLUMNS, dtype={"game": str, "clip": str}, keep_default_na=False)
    try:
        entries = [
            SplitEntry(
                game_id=row.game,
                clip_id=row.clip,
                frame_count=int(row.frames),
                assignment=Assignment(row.assignment) if row.assignment else None,
            )
            for row in df.itertuples(index=False)
        ]
        return SplitManifest(entries=entries)
    except ValueError as e:
        raise FrameDataError(f"{Path(path).name}: {e}") from e


def write_loss_log(trace: Sequence[Tuple[int, float]], path: Union[str, Path]) -> Path:
    """Write the per-epoch loss trace as `epoch,loss`."""
    df = pd.DataFrame([(str(e), f"{loss:.8f}") for e, loss in trace], columns=LOSS_COLUMNS)
    return _write_frame(df, path)


def read_loss_log(path: Union[str, Path]) -> List[Tuple[int, float]]:
    df = _read_frame(path, LOSS_COLUMNS)
    return [(int(row.epoch), float(row.loss)) for row in df.itertuples(index=False)]


def metrics_payload(counts: ConfusionCounts, report: MetricsReport, tol: float) -> dict:
    return {
        "tolerance": tol,
        "counts": counts.as_row(),
        "metrics": report.model_dump(),
        "metrics_rounded": report.rounded(),
    }


def write_metrics_json(counts: ConfusionCounts, report: MetricsReport, path: Union[str, Path], tol: float) -> Path:
    """Machine-readable evaluation report (sorted keys, undefined metrics as null)."""
    text = json.dumps(metrics_payload(counts, report, tol), indent=2, sort_keys=True) + "\n"
    return write_text_atomic(path, text)
