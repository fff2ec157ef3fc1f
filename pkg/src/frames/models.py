"""
Pydantic models for frames, frame sequences and temporal blocks.
Pixel data is held as float64 numpy arrays normalized to [0, 1].
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _check_unit_range(data: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{what} contains non-finite intensities")
    if data.size and (data.min() < 0.0 or data.max() > 1.0):
        raise ValueError(
            f"{what} intensities must lie in [0, 1], got [{data.min():.4f}, {data.max():.4f}]"
        )


class Frame(BaseModel):
    """
    A single video frame.
    `data` has shape (height, width, channels) with channels 3 (RGB) or 1 (gray).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray = Field(..., description="Normalized intensities, shape (H, W, C)")

    @field_validator("data", mode="before")
    @classmethod
    def validate_data(cls, v):
        """Coerce to float64 (H, W, C) and enforce the [0, 1] range."""
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"Frame data must be 2-D or 3-D, got shape {arr.shape}")
        if arr.shape[2] not in (1, 3):
            raise ValueError(f"Frame must have 1 or 3 channels, got {arr.shape[2]}")
        if arr.shape[0] <= 0 or arr.shape[1] <= 0:
            raise ValueError(f"Frame width/height must be positive, got shape {arr.shape}")
        _check_unit_range(arr, "Frame")
        return arr

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    @property
    def is_gray(self) -> bool:
        return self.channels == 1

    def as_rgb(self) -> np.ndarray:
        """Return a (H, W, 3) view, replicating the gray channel if needed."""
        if self.is_gray:
            return np.repeat(self.data, 3, axis=2)
        return self.data


class FrameSequence(BaseModel):
    """
    Ordered frames of one clip, all with the same size and channel count.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    frames: List[Frame] = Field(..., description="Frames in temporal order")
    frame_indices: List[int] = Field(..., description="Strictly increasing frame ids")
    fps_hint: Optional[float] = Field(None, gt=0, description="Source frames per second")

    @model_validator(mode="after")
    def validate_consistency(self):
        """Indices strictly increasing; one index per frame; shared geometry."""
        if len(self.frames) != len(self.frame_indices):
            raise ValueError(
                f"{len(self.frames)} frames but {len(self.frame_indices)} indices"
            )
        for prev, cur in zip(self.frame_indices, self.frame_indices[1:]):
            if cur <= prev:
                raise ValueError(f"Frame indices must be strictly increasing: {prev} then {cur}")
        if self.frames:
            shape = self.frames[0].data.shape
            for idx, frame in zip(self.frame_indices, self.frames):
                if frame.data.shape != shape:
                    raise ValueError(
                        f"Frame {idx} has shape {frame.data.shape}, expected {shape}"
                    )
        return self

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def width(self) -> int:
        return self.frames[0].width

    def as_array(self) -> np.ndarray:
        """Stack frames into a (T, H, W, C) array."""
        return np.stack([f.data for f in self.frames], axis=0)


class TemporalBlock(BaseModel):
    """
    T' consecutive frames: the RGB view feeds the network, the gray view feeds
    frame differencing.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rgb: np.ndarray = Field(..., description="Shape (T', H, W, 3), values in [0, 1]")
    gray: np.ndarray = Field(..., description="Shape (T', H, W), values in [0, 1]")
    start_index: int = Field(..., description="Frame id of the first frame in the block")
    frame_indices: List[int] = Field(default_factory=list, description="Frame ids covered")

    @model_validator(mode="after")
    def validate_views(self):
        """Both views carry the same T' frames at the same resolution."""
        if self.rgb.ndim != 4 or self.rgb.shape[3] != 3:
            raise ValueError(f"rgb view must have shape (T', H, W, 3), got {self.rgb.shape}")
        if self.gray.shape != self.rgb.shape[:3]:
            raise ValueError(
                f"gray view shape {self.gray.shape} does not match rgb {self.rgb.shape[:3]}"
            )
        if self.rgb.shape[0] < 2:
            raise ValueError("A temporal block needs at least 2 frames")
        _check_unit_range(self.rgb, "Block rgb view")
        _check_unit_range(self.gray, "Block gray view")
        if self.frame_indices and len(self.frame_indices) != self.rgb.shape[0]:
            raise ValueError("frame_indices length must equal T'")
        return self

    @property
    def t_prime(self) -> int:
        return int(self.rgb.shape[0])

    @property
    def height(self) -> int:
        return int(self.rgb.shape[1])

    @property
    def width(self) -> int:
        return int(self.rgb.shape[2])
