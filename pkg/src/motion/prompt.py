"""
Motion prompt: absolute frame differencing followed by a learnable
power-normalization (PN) squashing a(d) = 1 / (1 + exp(-slope * (d - shift))).

The numpy functions are the reference closed form with exact analytic
gradients; MotionPromptLayer is the same curve as a torch module so the slope
and shift train end-to-end with the tracker.
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import expit
from torch import nn

from ..frames.models import TemporalBlock
from ..errors import ShapeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_SLOPE = 5.0
DEFAULT_SHIFT = 0.25
MIN_SLOPE = 1e-3

# keeps float64 attention strictly inside (0, 1)
_OPEN_EPS = 1e-15

ArrayLike = Union[float, np.ndarray]


class PNParams(BaseModel):
    """The two motion-prompt parameters (slope lambda, shift mu)."""

    slope: float = Field(DEFAULT_SLOPE, gt=0, description="Steepness of the curve")
    shift: float = Field(DEFAULT_SHIFT, description="Difference magnitude mapped to 0.5")

    @field_validator("slope", "shift")
    @classmethod
    def validate_finite(cls, v):
        """Both parameters must be finite."""
        if not math.isfinite(v):
            raise ValueError(f"PN parameter must be finite: {v}")
        return v


class DiffStack(BaseModel):
    """T'-1 signed differencing maps and their absolute values."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    signed: np.ndarray = Field(..., description="Shape (T'-1, H, W), values in [-1, 1]")
    absolute: np.ndarray = Field(..., description="Shape (T'-1, H, W), values in [0, 1]")

    @model_validator(mode="after")
    def validate_stack(self):
        """absolute == |signed| and the shapes agree."""
        if self.signed.ndim != 3 or self.signed.shape != self.absolute.shape:
            raise ValueError(
                f"signed {self.signed.shape} and absolute {self.absolute.shape} must be (T'-1, H, W)"
            )
        if not np.array_equal(np.abs(self.signed), self.absolute):
            raise ValueError("absolute stack must equal |signed|")
        return self

    @property
    def height(self) -> int:
        return int(self.signed.shape[1])

    @property
    def width(self) -> int:
        return int(self.signed.shape[2])

    def __len__(self) -> int:
        return int(self.signed.shape[0])


class AttentionStack(BaseModel):
    """T'-1 motion attention maps with values strictly inside (0, 1)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    maps: np.ndarray = Field(..., description="Shape (T'-1, H, W)")

    @field_validator("maps")
    @classmethod
    def validate_open_interval(cls, v):
        if v.ndim != 3:
            raise ValueError(f"Attention maps must be (T'-1, H, W), got {v.shape}")
        if v.size and (v.min() <= 0.0 or v.max() >= 1.0):
            raise ValueError("Attention values must lie strictly inside (0, 1)")
        return v

    def __len__(self) -> int:
        return int(self.maps.shape[0])


def frame_diff(block: TemporalBlock) -> DiffStack:
    """
    Signed and absolute differences between consecutive gray frames.

    Args:
        block: Temporal block with T' >= 2 gray frames

    Returns:
        DiffStack with signed[tau] = gray[tau + 1] - gray[tau]
    """
    signed = np.diff(block.gray, axis=0)
    return DiffStack(signed=signed, absolute=np.abs(signed))


def pn_forward(d: ArrayLike, params: PNParams) -> ArrayLike:
    """
    Evaluate the PN curve element-wise.

    Args:
        d: Difference magnitude(s)
        params: Slope and shift

    Returns:
        a(d) in (0, 1), same shape as `d`
    """
    z = params.slope * (np.asarray(d, dtype=np.float64) - params.shift)
    out = np.clip(expit(z), _OPEN_EPS, 1.0 - _OPEN_EPS)
    return float(out) if np.ndim(out) == 0 else out


def attention(diffs: DiffStack, params: PNParams) -> AttentionStack:
    """
    Motion attention maps A = a(D+).

    Args:
        diffs: Differencing maps of one block
        params: PN parameters

    Returns:
        AttentionStack with the same shape as `diffs`
    """
    return AttentionStack(maps=pn_forward(diffs.absolute, params))


def pn_grad(
    d: ArrayLike,
    params: PNParams,
    upstream: ArrayLike = 1.0,
) -> Tuple[float, float, ArrayLike]:
    """
    Analytic gradients of the PN curve, chained with an upstream gradient.

    With s = a(d): da/dslope = s(1-s)(d-shift), da/dshift = -slope s(1-s),
    da/dd = slope s(1-s). Slope and shift gradients are summed over all
    elements; the input gradient keeps the shape of `d`.

    Args:
        d: Input difference(s)
        params: PN parameters
        upstream: Gradient of the loss w.r.t. the attention output

    Returns:
        (d_slope, d_shift, d_input)
    """
    d_arr = np.asarray(d, dtype=np.float64)
    up = np.broadcast_to(np.asarray(upstream, dtype=np.float64), d_arr.shape)
    z = params.slope * (d_arr - params.shift)
    # s(1 - s) without cancellation in either tail
    ds = expit(z) * expit(-z) * up
    d_slope = float(np.sum(ds * (d_arr - params.shift)))
    d_shift = float(np.sum(-params.slope * ds))
    d_input = params.slope * ds
    if d_input.ndim == 0:
        d_input = float(d_input)
    return d_slope, d_shift, d_input


def prompted_frames(block: TemporalBlock, attn: AttentionStack) -> np.ndarray:
    """
    Motion-prompted RGB frames: attention map tau times RGB frame tau + 1.

    Returns:
        Array of shape (T'-1, H, W, 3) in [0, 1]
    """
    if attn.maps.shape != (block.t_prime - 1, block.height, block.width):
        raise ShapeMismatchError(
            f"Attention {attn.maps.shape} does not fit block of T'={block.t_prime} "
            f"at {block.width}x{block.height}"
        )
    return attn.maps[:, :, :, None] * block.rgb[1:]


class MotionPromptLayer(nn.Module):
    """
    Torch version of the PN curve applied to absolute gray-frame differences.
    Input (N, T', H, W) gray frames, output (N, T'-1, H, W) attention.
    """

    def __init__(self, params: Optional[PNParams] = None):
        """
        Initialize the layer.

        Args:
            params: Starting slope/shift (defaults 5.0 / 0.25)
        """
        super().__init__()
        params = params or PNParams()
        self.slope = nn.Parameter(torch.tensor(float(params.slope)))
        self.shift = nn.Parameter(torch.tensor(float(params.shift)))

    def forward(self, gray: torch.Tensor) -> torch.Tensor:
        diffs = torch.abs(gray[:, 1:] - gray[:, :-1])
        return self.attention_from_diffs(diffs)

    def attention_from_diffs(self, absolute_diffs: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.slope * (absolute_diffs - self.shift))

    @torch.no_grad()
    def clamp_slope_(self) -> None:
        """Keep the slope positive so attention stays increasing in |D|."""
        self.slope.clamp_(min=MIN_SLOPE)

    @property
    def params(self) -> PNParams:
        return PNParams(slope=float(self.slope.detach()), shift=float(self.shift.detach()))
