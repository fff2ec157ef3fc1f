"""
Frame directory I/O and per-frame pixel transforms.

Layout on disk: `<clip_dir>/<%06d>.png` named by frame id, optional
`labels.csv` sidecar (read by src.synth.labels).
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import cv2
import numpy as np

from .models import Frame, FrameSequence
from ..errors import FrameDataError, ShapeMismatchError
from ..utils.io import write_bytes_atomic

logger = logging.getLogger(__name__)

# ITU-R BT.601 luma weights (R, G, B)
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)

FRAME_NAME_FORMAT = "{:06d}.png"


def to_gray(frame: Frame) -> Frame:
    """
    Convert an RGB frame to a single-channel luma frame.

    Args:
        frame: 3-channel frame in [0, 1]

    Returns:
        1-channel frame, value = 0.299 R + 0.587 G + 0.114 B

    Raises:
        ShapeMismatchError: If the frame is not 3-channel
    """
    if frame.channels != 3:
        raise ShapeMismatchError(f"to_gray expects a 3-channel frame, got {frame.channels}")
    return Frame(data=rgb_to_luma(frame.data)[:, :, None])


def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    """Luma of an array whose last axis is RGB; result clipped to [0, 1]."""
    return np.clip(rgb @ LUMA_WEIGHTS, 0.0, 1.0)


def normalize_intensities(raw: np.ndarray) -> np.ndarray:
    """Scale integer pixel data to [0, 1] floats (8-bit divides by 255)."""
    if raw.dtype == np.uint8:
        return raw.astype(np.float64) / 255.0
    if raw.dtype == np.uint16:
        return raw.astype(np.float64) / 65535.0
    raise FrameDataError(f"Unsupported pixel dtype: {raw.dtype}")


def resize_frame(frame: Frame, width: int, height: int) -> Frame:
    """
    Resize a frame with area interpolation (downscale) or linear (upscale).

    Args:
        frame: Input frame
        width: Target width in pixels
        height: Target height in pixels

    Returns:
        Resized frame, same channel count
    """
    if frame.width == width and frame.height == height:
        return frame
    shrinking = width * height < frame.width * frame.height
    interp = cv2.INTER_AREA if shrinking else cv2.INTER_LINEAR
    out = cv2.resize(frame.data, (width, height), interpolation=interp)
    if out.ndim == 2:
        out = out[:, :, None]
    return Frame(data=np.clip(out, 0.0, 1.0))


def _frame_index(path: Path) -> Optional[int]:
    stem = path.stem
    return int(stem) if stem.isdigit() else None


def _read_png(path: Path) -> np.ndarray:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FrameDataError(f"Unreadable frame file: {path.name}")
    if raw.ndim == 3 and raw.shape[2] == 4:
        raw = raw[:, :, :3]
    if raw.ndim == 3:
        raw = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB)
    return normalize_intensities(raw)


def list_frame_files(path: Union[str, Path]) -> List[Tuple[int, Path]]:
    """
    List `<index>.png` files of a clip directory, sorted by numeric index.

    Raises:
        FrameDataError: If the directory is missing or holds no frames
    """
    clip_dir = Path(path)
    if not clip_dir.is_dir():
        raise FrameDataError(f"Frame directory not found: {clip_dir}")
    indexed = []
    for file in clip_dir.glob("*.png"):
        idx = _frame_index(file)
        if idx is not None:
            indexed.append((idx, file))
    if not indexed:
        raise FrameDataError(f"no frames found in {clip_dir}")
    indexed.sort(key=lambda item: item[0])
    return indexed


def load_sequence(
    path: Union[str, Path],
    size: Optional[Tuple[int, int]] = None,
    fps_hint: Optional[float] = None,
) -> FrameSequence:
    """
    Load a clip directory of numbered PNG frames.

    Args:
        path: Directory holding `<zero-padded index>.png` files
        size: Optional (width, height) to resize every frame to
        fps_hint: Optional source frame rate

    Returns:
        FrameSequence sorted by frame index, intensities in [0, 1]

    Raises:
        FrameDataError: Missing directory, no frames, unreadable file or
            dimension mismatch (the message names the offending file)
    """
    indexed = list_frame_files(path)

    frames: List[Frame] = []
    indices: List[int] = []
    reference_shape = None
    for idx, file in indexed:
        data = _read_png(file)
        if reference_shape is None:
            reference_shape = data.shape
        elif data.shape != reference_shape:
            raise FrameDataError(
                f"Dimension mismatch in {file.name}: {data.shape[1]}x{data.shape[0]} "
                f"vs {reference_shape[1]}x{reference_shape[0]}"
            )
        frame = Frame(data=data)
        if size is not None:
            frame = resize_frame(frame, size[0], size[1])
        frames.append(frame)
        indices.append(idx)

    logger.info(
        f"Loaded {len(frames)} frames from {path} "
        f"({frames[0].width}x{frames[0].height}, {frames[0].channels} ch)"
    )
    return FrameSequence(frames=frames, frame_indices=indices, fps_hint=fps_hint)


def quantize_8bit(data: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to uint8 with round-half-to-even."""
    return np.rint(np.clip(data, 0.0, 1.0) * 255.0).astype(np.uint8)


def encode_png(data: np.ndarray) -> bytes:
    """Encode a (H, W, C) [0, 1] array as 8-bit PNG bytes (RGB order in, BGR on disk)."""
    pixels = quantize_8bit(data)
    if pixels.ndim == 3 and pixels.shape[2] == 3:
        pixels = cv2.cvtColor(pixels, cv2.COLOR_RGB2BGR)
    elif pixels.ndim == 3:
        pixels = pixels[:, :, 0]
    ok, buf = cv2.imencode(".png", pixels)
    if not ok:
        raise FrameDataError("PNG encoding failed")
    return buf.tobytes()


def save_sequence(seq: FrameSequence, out_dir: Union[str, Path]) -> List[Path]:
    """
    Write a sequence as `<out_dir>/<%06d>.png` 8-bit files.

    Args:
        seq: Frames to write
        out_dir: Destination directory (created if needed)

    Returns:
        Written file paths in frame order
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for idx, frame in zip(seq.frame_indices, seq.frames):
        target = out / FRAME_NAME_FORMAT.format(idx)
        write_bytes_atomic(target, encode_png(frame.data))
        written.append(target)
    logger.info(f"Saved {len(written)} frames to {out}")
    return written
