"""
labels.csv reading and writing (`frame,visibility,x,y`, x/y empty when hidden).
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from .models import BallLabel
from ..errors import FrameDataError
from ..utils.io import atomic_path

logger = logging.getLogger(__name__)

LABEL_COLUMNS = ["frame", "visibility", "x", "y"]


def format_coordinate(value: Optional[float]) -> str:
    """Integral values print without decimals, others with up to 3."""
    if value is None:
        return ""
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.3f}".rstrip("0").rstrip(".")


def labels_frame(labels: Sequence[BallLabel]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "frame": [str(label.frame_index) for label in labels],
            "visibility": [str(label.visibility) for label in labels],
            "x": [format_coordinate(label.x) for label in labels],
            "y": [format_coordinate(label.y) for label in labels],
        },
        columns=LABEL_COLUMNS,
    )


def write_labels(labels: Sequence[BallLabel], path: Union[str, Path]) -> Path:
    """
    Write labels atomically as UTF-8 CSV with LF line endings.

    Args:
        labels: One label per frame
        path: Destination CSV

    Returns:
        The written path
    """
    with atomic_path(path) as tmp:
        labels_frame(labels).to_csv(tmp, index=False, lineterminator="\n", encoding="utf-8")
    logger.debug(f"Wrote {len(labels)} labels to {path}")
    return Path(path)


def _optional_float(value) -> Optional[float]:
    return None if pd.isna(value) else float(value)


def read_labels(path: Union[str, Path]) -> List[BallLabel]:
    """
    Read a labels.csv file.

    Raises:
        FrameDataError: Missing file, wrong header or an invalid row
    """
    path = Path(path)
    if not path.is_file():
        raise FrameDataError(f"Labels file not found: {path}")
    df = pd.read_csv(path, dtype={"frame": "Int64", "visibility": "Int64"})
    if list(df.columns) != LABEL_COLUMNS:
        raise FrameDataError(f"{path.name}: expected header {','.join(LABEL_COLUMNS)}")
    labels = []
    for row in df.itertuples(index=False):
        try:
            labels.append(
                BallLabel(
                    frame_index=int(row.frame),
                    visibility=int(row.visibility),
                    x=_optional_float(row.x),
                    y=_optional_float(row.y),
                )
            )
        except (ValueError, TypeError) as e:
            raise FrameDataError(f"{path.name}: bad row for frame {row.frame}: {e}") from e
    return labels
