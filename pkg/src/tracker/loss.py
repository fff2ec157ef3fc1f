"""
Focal-style weighted binary cross-entropy for heatmap regression.

Per pixel, with q the clamped prediction and y the target:
    L = -[(1 - q)^2 * y * ln q + q^2 * (1 - y) * ln(1 - q)]
"""

from typing import Union

import numpy as np
import torch
from scipy.special import expit

from .models import HeatmapStack, LossReport
from ..errors import ShapeMismatchError

Q_EPS = 1e-7

HeatmapLike = Union[HeatmapStack, torch.Tensor, np.ndarray]


def _maps(x: HeatmapLike) -> torch.Tensor:
    return torch.as_tensor(getattr(x, "maps", x))


def wbce_terms(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """
    Element-wise loss terms.

    Args:
        pred: Predicted heatmap values in (0, 1)
        target: Ground-truth values in [0, 1], same shape

    Returns:
        Tensor of per-pixel terms, same shape as the inputs
    """
    if pred.shape != target.shape:
        raise ShapeMismatchError(
            f"Prediction {tuple(pred.shape)} and target {tuple(target.shape)} differ"
        )
    q = pred.clamp(Q_EPS, 1.0 - Q_EPS)
    y = target.to(q.dtype)
    return -((1.0 - q) ** 2 * y * torch.log(q) + q ** 2 * (1.0 - y) * torch.log(1.0 - q))


def wbce_from_logits(logits: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Differentiable mean loss of sigmoid(logits) against target (training path)."""
    return wbce_terms(torch.sigmoid(logits), target).mean()


def wbce_loss(pred: HeatmapLike, target: HeatmapLike) -> LossReport:
    """
    Weighted BCE between predicted and ground-truth heatmap stacks.

    Args:
        pred: Predicted heatmaps, (T', H, W) or (N, T', H, W)
        target: Ground-truth heatmaps of the same shape

    Returns:
        LossReport with the overall mean and the mean of each slice

    Raises:
        ShapeMismatchError: If the shapes differ
    """
    p = _maps(pred).to(torch.float64)
    y = _maps(target).to(torch.float64)
    terms = wbce_terms(p, y)
    if terms.dim() < 3:
        raise ShapeMismatchError(f"Heatmap stacks must be (T', H, W), got {tuple(terms.shape)}")
    slice_dim = terms.dim() - 3
    other_dims = [d for d in range(terms.dim()) if d != slice_dim]
    per_slice = terms.mean(dim=other_dims)
    return LossReport(
        total=max(float(terms.mean()), 0.0),
        per_slice=[float(v) for v in per_slice],
        pixel_count=int(terms.numel()),
    )


def wbce_logit_grad(logit: Union[float, np.ndarray], y: Union[float, np.ndarray]) -> np.ndarray:
    """
    Closed-form derivative of one per-pixel term w.r.t. the pre-sigmoid logit
    (valid where the clamp is inactive).

    dL/dz = 2y q(1-q)^2 ln q - y(1-q)^3 - 2(1-y) q^2 (1-q) ln(1-q) + (1-y) q^3
    """
    z = np.asarray(logit, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    q = expit(z)
    r = 1.0 - q
    return (
        2.0 * y * q * r ** 2 * np.log(q)
        - y * r ** 3
        - 2.0 * (1.0 - y) * q ** 2 * r * np.log(r)
        + (1.0 - y) * q ** 3
    )
