"""
Pydantic models for synthetic clip generation and ball labels.
"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class BackgroundMode(str, Enum):
    FLAT = "flat"
    GRADIENT = "gradient"
    MOVING_DISTRACTOR = "moving-distractor"


class SynthConfig(BaseModel):
    """
    Parameters of one synthetic fast-ball clip (or a set of clips).
    All randomness derives from `seed`.
    """

    width: int = Field(128, gt=0, description="Frame width in pixels")
    height: int = Field(72, gt=0, description="Frame height in pixels")
    n_frames: int = Field(100, ge=1, description="Frames per clip")
    n_clips: int = Field(1, ge=1, description="Number of clips to write")
    ball_radius: int = Field(2, ge=1, description="Ball radius in pixels")
    speed_min: float = Field(4.0, gt=0, description="Minimum speed, pixels/frame")
    speed_max: float = Field(14.0, gt=0, description="Maximum speed, pixels/frame")
    gravity: float = Field(0.0, ge=0, description="Vertical acceleration, pixels/frame^2")
    contrast: float = Field(0.8, ge=0, le=1, description="Ball intensity gap over background")
    occlusion_prob: float = Field(0.0, ge=0, le=1, description="Per-frame hide probability")
    occlusion_bursts: bool = Field(False, description="Hidden frames start geometric-length bursts")
    noise_sigma: float = Field(0.0, ge=0, description="Per-pixel Gaussian noise std")
    background_mode: BackgroundMode = Field(BackgroundMode.FLAT, description="Background style")
    seed: int = Field(0, description="Random seed")

    @model_validator(mode="after")
    def validate_geometry(self):
        if self.speed_max < self.speed_min:
            raise ValueError(f"speed_max {self.speed_max} < speed_min {self.speed_min}")
        span = 2 * self.ball_radius + 1
        if self.width <= span or self.height <= span:
            raise ValueError(
                f"{self.width}x{self.height} frame too small for ball radius {self.ball_radius}"
            )
        return self

    @property
    def speed_range(self) -> Tuple[float, float]:
        return (self.speed_min, self.speed_max)


class BallLabel(BaseModel):
    """Ground truth for one frame; x and y are set exactly when the ball is visible."""

    frame_index: int = Field(..., description="Frame id")
    visibility: int = Field(..., description="1 visible, 0 not visible")
    x: Optional[float] = Field(None, ge=0, description="Ball center column")
    y: Optional[float] = Field(None, ge=0, description="Ball center row")

    @field_validator("visibility")
    @classmethod
    def validate_visibility(cls, v):
        if v not in (0, 1):
            raise ValueError(f"visibility must be 0 or 1, got {v}")
        return v

    @model_validator(mode="after")
    def validate_coordinates(self):
        if self.visibility == 1 and (self.x is None or self.y is None):
            raise ValueError(f"Frame {self.frame_index}: visible ball needs x and y")
        if self.visibility == 0 and (self.x is not None or self.y is not None):
            raise ValueError(f"Frame {self.frame_index}: invisible ball must not carry x/y")
        return self

    @property
    def visible(self) -> bool:
        return self.visibility == 1


def scale_coordinate(value: float, from_length: int, to_length: int) -> float:
    """Map a pixel-center coordinate between resolutions."""
    scale = to_length / from_length
    return max((value + 0.5) * scale - 0.5, 0.0)


def scale_label(label: BallLabel, from_size: Tuple[int, int], to_size: Tuple[int, int]) -> BallLabel:
    """
    Rescale a label from one (width, height) resolution to another.

    Args:
        label: Source label
        from_size: Resolution the label refers to
        to_size: Target resolution

    Returns:
        New label (invisible labels pass through)
    """
    if not label.visible or from_size == to_size:
        return label
    return BallLabel(
        frame_index=label.frame_index,
        visibility=1,
        x=scale_coordinate(label.x, from_size[0], to_size[0]),
        y=scale_coordinate(label.y, from_size[1], to_size[1]),
    )
