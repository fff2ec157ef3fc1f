"""
Compact U-Net style visual backbone and the motion-aware tracker built on it.

Encoder: `levels` stages of (conv3x3 + BN + ReLU) x 2 followed by 2x max-pool,
then a bottleneck. Decoder: nearest-neighbour 2x upsampling, optional skip
concatenation, (conv3x3 + BN + ReLU) x 2. A final linear 1x1 conv emits T'
pre-sigmoid maps. Fusion happens once, right before the sigmoid.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from .config import FusionMode, NetworkConfig
from .fusion import fuse
from .models import (
    FeatureStack,
    HeatmapStack,
    ModelWeights,
    MODEL_VERSION,
    PN_SHIFT_KEY,
    PN_SLOPE_KEY,
)
from ..errors import ShapeMismatchError
from ..frames.models import TemporalBlock
from ..motion.prompt import MotionPromptLayer, PNParams

logger = logging.getLogger(__name__)


def double_conv(in_channels: int, out_channels: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1),
        nn.BatchNorm2d(out_channels),
        nn.ReLU(inplace=True),
        nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1),
        nn.BatchNorm2d(out_channels),
        nn.ReLU(inplace=True),
    )


class VisualBackbone(nn.Module):
    """Encoder-decoder mapping (N, 3T', H, W) frames to (N, T', H, W) features."""

    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        c = config.base_channels
        widths = [c * 2 ** i for i in range(config.levels + 1)]

        self.encoders = nn.ModuleList()
        in_channels = 3 * config.t_prime
        for width in widths[:-1]:
            self.encoders.append(double_conv(in_channels, width))
            in_channels = width
        self.bottleneck = double_conv(widths[-2], widths[-1])

        self.decoders = nn.ModuleList()
        in_channels = widths[-1]
        for width in reversed(widths[:-1]):
            skip = width if config.skip_connections else 0
            self.decoders.append(double_conv(in_channels + skip, width))
            in_channels = width
        self.head = nn.Conv2d(widths[0], config.t_prime, kernel_size=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        skips = []
        for encoder in self.encoders:
            x = encoder(x)
            skips.append(x)
            x = F.max_pool2d(x, kernel_size=2, stride=2)
        x = self.bottleneck(x)
        for decoder, skip in zip(self.decoders, reversed(skips)):
            x = F.interpolate(x, scale_factor=2, mode="nearest")
            if self.config.skip_connections:
                x = torch.cat([x, skip], dim=1)
            x = decoder(x)
        return self.head(x)


class TrackerNet(nn.Module):
    """
    Visual backbone plus (optionally) the motion prompt layer.

    forward(rgb, gray) returns fused pre-sigmoid maps (N, T', H, W); heatmaps
    are their sigmoid.
    """

    def __init__(self, config: NetworkConfig, seed: int = 0, pn_params: Optional[PNParams] = None):
        """
        Build the network with seeded fan-in-scaled uniform initialization.

        Args:
            config: Network configuration
            seed: Initialization seed
            pn_params: Starting motion prompt parameters (fusion modes only)
        """
        super().__init__()
        self.config = config
        self.backbone = VisualBackbone(config)
        self.motion_prompt = MotionPromptLayer(pn_params) if config.uses_motion else None
        self.reset_parameters(seed)

    def reset_parameters(self, seed: int) -> None:
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for module in self.backbone.modules():
                if isinstance(module, nn.Conv2d):
                    fan_in = module.in_channels * module.kernel_size[0] * module.kernel_size[1]
                    bound = math.sqrt(6.0 / fan_in)
                    module.weight.uniform_(-bound, bound, generator=generator)
                    bias_bound = 1.0 / math.sqrt(fan_in)
                    module.bias.uniform_(-bias_bound, bias_bound, generator=generator)
                elif isinstance(module, nn.BatchNorm2d):
                    module.reset_parameters()

    @property
    def fusion_mode(self) -> FusionMode:
        return self.config.fusion_mode

    def features(self, rgb: torch.Tensor) -> torch.Tensor:
        return self.backbone(rgb)

    def motion_attention(self, gray: torch.Tensor) -> torch.Tensor:
        if self.motion_prompt is None:
            raise ShapeMismatchError("Model was built with fusion_mode=off; no motion prompt layer")
        return self.motion_prompt(gray)

    def forward(self, rgb: torch.Tensor, gray: torch.Tensor) -> torch.Tensor:
        feats = self.features(rgb)
        if self.motion_prompt is None:
            return feats
        return fuse(self.motion_attention(gray), feats, self.fusion_mode)

    def clamp_parameters_(self) -> None:
        if self.motion_prompt is not None:
            self.motion_prompt.clamp_slope_()

    def to_weights(self) -> ModelWeights:
        """Snapshot the state dict as float32 numpy blocks."""
        tensors = {
            name: value.detach().cpu().to(torch.float32).numpy().copy()
            for name, value in self.state_dict().items()
        }
        return ModelWeights(version=MODEL_VERSION, config=self.config, tensors=tensors)

    def load_weights(self, weights: ModelWeights, allow_missing_motion: bool = False) -> None:
        """
        Copy weights into this network.

        Args:
            weights: Source weights
            allow_missing_motion: Accept a fusion-off source for a fusion model
                (fine-tuning); the PN layer keeps its current parameters

        Raises:
            ShapeMismatchError: On missing/unexpected names or shape mismatch
        """
        own = self.state_dict()
        source = dict(weights.tensors)
        missing = [name for name in own if name not in source]
        if allow_missing_motion:
            missing = [name for name in missing if name not in (PN_SLOPE_KEY, PN_SHIFT_KEY)]
        unexpected = [name for name in source if name not in own]
        if missing or unexpected:
            raise ShapeMismatchError(
                f"Weights do not fit network: missing={missing} unexpected={unexpected}"
            )
        new_state = {}
        for name, target in own.items():
            if name not in source:
                new_state[name] = target
                continue
            array = source[name]
            if tuple(array.shape) != tuple(target.shape):
                raise ShapeMismatchError(
                    f"Block {name}: stored shape {tuple(array.shape)} vs network {tuple(target.shape)}"
                )
            new_state[name] = torch.from_numpy(np.asarray(array)).to(dtype=target.dtype)
        self.load_state_dict(new_state)

    @classmethod
    def from_weights(cls, weights: ModelWeights) -> "TrackerNet":
        model = cls(weights.config)
        model.load_weights(weights)
        model.eval()
        return model


def block_tensors(
    blocks: Sequence[TemporalBlock],
    dtype: torch.dtype = torch.float32,
) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    Stack blocks into network inputs.

    Returns:
        rgb (N, 3T', H, W) with frames channel-major per frame, gray (N, T', H, W)
    """
    rgb = np.stack([b.rgb for b in blocks], axis=0)  # N, T', H, W, 3
    n, t, h, w, _ = rgb.shape
    rgb = rgb.transpose(0, 1, 4, 2, 3).reshape(n, t * 3, h, w)
    gray = np.stack([b.gray for b in blocks], axis=0)
    return (
        torch.from_numpy(np.ascontiguousarray(rgb)).to(dtype),
        torch.from_numpy(np.ascontiguousarray(gray)).to(dtype),
    )


def check_block(block: TemporalBlock, config: NetworkConfig) -> None:
    if block.t_prime != config.t_prime:
        raise ShapeMismatchError(f"Block has T'={block.t_prime}, network expects {config.t_prime}")
    if (block.width, block.height) != config.size:
        raise ShapeMismatchError(
            f"Block is {block.width}x{block.height}, network expects "
            f"{config.input_width}x{config.input_height}"
        )


def as_model(model: Union[TrackerNet, ModelWeights]) -> TrackerNet:
    """Accept either a live network or serialized weights."""
    if isinstance(model, ModelWeights):
        return TrackerNet.from_weights(model)
    return model


def _model_dtype(model: TrackerNet) -> torch.dtype:
    return next(model.parameters()).dtype


def _open_unit(h: torch.Tensor) -> torch.Tensor:
    eps = torch.finfo(h.dtype).eps
    return h.clamp(eps, 1.0 - eps)


@torch.no_grad()
def extract_features(block: TemporalBlock, model: Union[TrackerNet, ModelWeights]) -> FeatureStack:
    """
    Pre-sigmoid visual feature maps of one block.

    Args:
        block: Block at the configured resolution and T'
        model: Tracker network or its weights (evaluated in inference mode)

    Returns:
        FeatureStack of T' maps at input resolution
    """
    model = as_model(model)
    check_block(block, model.config)
    model.eval()
    rgb, _ = block_tensors([block], dtype=_model_dtype(model))
    return FeatureStack(maps=model.features(rgb)[0])


@torch.no_grad()
def predict_heatmaps(
    block: TemporalBlock,
    model: Union[TrackerNet, ModelWeights],
    params: Optional[PNParams] = None,
    mode: Optional[FusionMode] = None,
) -> HeatmapStack:
    """
    Heatmaps H = sigmoid(fuse(A, V)) for one block.

    Args:
        block: Input block
        model: Tracker network
        params: Override for the PN parameters (defaults to the model's own)
        mode: Override for the fusion mode (defaults to the model's config);
            `off` gives sigmoid(V) and ignores PN parameters entirely

    Returns:
        HeatmapStack with values strictly inside (0, 1)
    """
    model = as_model(model)
    check_block(block, model.config)
    model.eval()
    mode = FusionMode(mode) if mode is not None else model.fusion_mode
    rgb, gray = block_tensors([block], dtype=_model_dtype(model))
    feats = model.features(rgb)
    if mode != FusionMode.OFF:
        if params is None:
            if model.motion_prompt is None:
                raise ShapeMismatchError(f"fusion mode {mode.value} needs PN parameters")
            params = model.motion_prompt.params
        diffs = torch.abs(gray[:, 1:] - gray[:, :-1])
        attn = torch.sigmoid(params.slope * (diffs - params.shift))
        feats = fuse(attn, feats, mode)
    return HeatmapStack(maps=_open_unit(torch.sigmoid(feats))[0])


@torch.no_grad()
def predict_heatmap_batch(
    model: TrackerNet,
    blocks: Sequence[TemporalBlock],
    batch_size: int = 8,
) -> np.ndarray:
    """
    Heatmaps for many blocks using the model's own fusion settings.

    Returns:
        Array of shape (len(blocks), T', H, W)
    """
    model.eval()
    dtype = _model_dtype(model)
    outputs: List[np.ndarray] = []
    for start in range(0, len(blocks), batch_size):
        chunk = blocks[start:start + batch_size]
        for block in chunk:
            check_block(block, model.config)
        rgb, gray = block_tensors(chunk, dtype=dtype)
        heat = _open_unit(torch.sigmoid(model(rgb, gray)))
        outputs.append(heat.cpu().numpy())
    return np.concatenate(outputs, axis=0)
