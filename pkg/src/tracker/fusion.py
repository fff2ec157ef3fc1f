"""
Motion-aware fusion of attention maps with pre-sigmoid visual feature maps.

Both variants map (T'-1 attention maps, T' feature maps) to T' fused maps and
work on any leading batch dimensions: attention (..., T'-1, H, W), features
(..., T', H, W).
"""

from typing import Optional, Union

import numpy as np
import torch

from .config import FusionMode
from .models import FeatureStack
from ..errors import ShapeMismatchError

TensorLike = Union[torch.Tensor, np.ndarray, FeatureStack]


def _as_tensor(x, like: Optional[torch.Tensor] = None) -> torch.Tensor:
    maps = getattr(x, "maps", x)
    tensor = torch.as_tensor(maps)
    if like is not None:
        tensor = tensor.to(dtype=like.dtype, device=like.device)
    return tensor


def _check_shapes(attn: torch.Tensor, feats: torch.Tensor) -> None:
    if feats.dim() < 3 or attn.dim() != feats.dim():
        raise ShapeMismatchError(
            f"Attention {tuple(attn.shape)} and features {tuple(feats.shape)} must both be (..., T, H, W)"
        )
    if attn.shape[-2:] != feats.shape[-2:]:
        raise ShapeMismatchError(
            f"Spatial size mismatch: attention {tuple(attn.shape[-2:])} vs features {tuple(feats.shape[-2:])}"
        )
    if attn.shape[-3] != feats.shape[-3] - 1:
        raise ShapeMismatchError(
            f"Need T'-1 attention maps for T' feature maps, got {attn.shape[-3]} and {feats.shape[-3]}"
        )
    if attn.shape[:-3] != feats.shape[:-3]:
        raise ShapeMismatchError("Batch dimensions of attention and features differ")


def _wrap(result: torch.Tensor, feats) -> Union[torch.Tensor, FeatureStack]:
    return FeatureStack(maps=result) if isinstance(feats, FeatureStack) else result


def fuse_v1(attn, feats):
    """
    [V_0, A_0 * V_1, ..., A_{T'-2} * V_{T'-1}]: the first slice passes through.

    Args:
        attn: T'-1 attention maps (tensor, array or AttentionStack)
        feats: T' feature maps (tensor or FeatureStack)

    Returns:
        T' fused maps, same container type as `feats`
    """
    v = _as_tensor(feats)
    a = _as_tensor(attn, like=v)
    _check_shapes(a, v)
    fused = torch.cat([v[..., :1, :, :], a * v[..., 1:, :, :]], dim=-3)
    return _wrap(fused, feats)


def fuse_v2(attn, feats):
    """
    Every feature slice scaled by the mean of the T'-1 attention maps.

    Args:
        attn: T'-1 attention maps
        feats: T' feature maps

    Returns:
        T' fused maps, same container type as `feats`
    """
    v = _as_tensor(feats)
    a = _as_tensor(attn, like=v)
    _check_shapes(a, v)
    mean_attn = a.mean(dim=-3, keepdim=True)
    return _wrap(mean_attn * v, feats)


def fuse(attn, feats, mode: FusionMode):
    """Dispatch on fusion mode; `off` returns the features unchanged."""
    mode = FusionMode(mode)
    if mode == FusionMode.V1:
        return fuse_v1(attn, feats)
    if mode == FusionMode.V2:
        return fuse_v2(attn, feats)
    return feats
