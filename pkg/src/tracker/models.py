"""
Pydantic models for tracker outputs, loss reports and serialized weights.
"""

from typing import Dict, List

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import FusionMode, NetworkConfig

MODEL_VERSION = "MTRK1"

PN_SLOPE_KEY = "motion_prompt.slope"
PN_SHIFT_KEY = "motion_prompt.shift"

# Normalization running statistics: stored, but not trainable
NON_TRAINABLE_SUFFIXES = ("running_mean", "running_var", "num_batches_tracked")


def is_trainable_block(name: str) -> bool:
    return not name.endswith(NON_TRAINABLE_SUFFIXES)


class FeatureStack(BaseModel):
    """T' pre-sigmoid feature maps, shape (T', H, W)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    maps: torch.Tensor = Field(..., description="Pre-sigmoid maps (..., T', H, W)")

    @field_validator("maps")
    @classmethod
    def validate_finite(cls, v):
        if v.dim() < 3:
            raise ValueError(f"Feature maps must be (T', H, W), got {tuple(v.shape)}")
        if not torch.isfinite(v).all():
            raise ValueError("Feature maps contain non-finite values")
        return v

    def __len__(self) -> int:
        return int(self.maps.shape[-3])


class HeatmapStack(BaseModel):
    """T' heatmaps with values in [0, 1] (predictions stay strictly inside)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    maps: torch.Tensor = Field(..., description="Heatmaps (..., T', H, W)")

    @field_validator("maps", mode="before")
    @classmethod
    def validate_range(cls, v):
        v = torch.as_tensor(v)
        if v.dim() < 3:
            raise ValueError(f"Heatmaps must be (T', H, W), got {tuple(v.shape)}")
        if v.numel() and (v.min() < 0 or v.max() > 1):
            raise ValueError("Heatmap values must lie in [0, 1]")
        return v

    def __len__(self) -> int:
        return int(self.maps.shape[-3])

    def numpy(self) -> np.ndarray:
        return self.maps.detach().cpu().numpy()


class LossReport(BaseModel):
    """Weighted BCE summary over a batch of heatmap stacks."""

    total: float = Field(..., ge=0, description="Mean of all per-pixel terms")
    per_slice: List[float] = Field(..., description="Mean per-pixel term of each slice")
    pixel_count: int = Field(..., gt=0, description="Number of pixels averaged")


class ModelWeights(BaseModel):
    """
    Named parameter blocks plus the config they were built for.
    Tensors are float32 numpy arrays keyed by state-dict name.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    version: str = Field(MODEL_VERSION, description="Serialization version tag")
    config: NetworkConfig = Field(..., description="Network config echo")
    tensors: Dict[str, np.ndarray] = Field(..., description="State-dict name -> float32 array")

    @field_validator("tensors")
    @classmethod
    def validate_finite(cls, v):
        for name, arr in v.items():
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"Parameter block {name} contains non-finite values")
        return v

    @model_validator(mode="after")
    def validate_motion_params(self):
        """PN parameters are present exactly when fusion is enabled."""
        has_pn = PN_SLOPE_KEY in self.tensors and PN_SHIFT_KEY in self.tensors
        wants_pn = self.config.fusion_mode != FusionMode.OFF
        if has_pn != wants_pn:
            raise ValueError(
                f"fusion_mode={self.config.fusion_mode.value} but PN parameters "
                f"{'present' if has_pn else 'missing'}"
            )
        return self

    def trainable_names(self) -> List[str]:
        return [name for name in self.tensors if is_trainable_block(name)]
