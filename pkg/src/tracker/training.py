"""
Mini-batch training of the tracker with the weighted BCE loss.
"""

import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field

from .config import NetworkConfig
from .loss import wbce_from_logits
from .models import HeatmapStack, ModelWeights
from .network import TrackerNet, block_tensors, check_block
from ..errors import FrameDataError, NumericalAbortError
from ..frames.blocks import make_blocks
from ..frames.models import FrameSequence, TemporalBlock
from ..synth.generator import DEFAULT_SIGMA_G, render_gt_heatmap
from ..synth.models import BallLabel, scale_label

logger = logging.getLogger(__name__)

DEFAULT_LR = 1.0
FINETUNE_LR = 1e-3
DEFAULT_LR_DECAY = 0.9

TargetLike = Union[HeatmapStack, np.ndarray]
Sample = Tuple[TemporalBlock, TargetLike]


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADADELTA = "adadelta"


class TrainingHyperParams(BaseModel):
    """Optimization settings; `init_weights` switches to fine-tuning."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    lr: float = Field(DEFAULT_LR, gt=0, description="Initial learning rate")
    epochs: int = Field(30, ge=1, description="Passes over the dataset")
    batch_size: int = Field(4, ge=1, description="Blocks per optimizer step")
    seed: int = Field(0, description="Seed for init, shuffling and augmentation")
    lr_decay: Optional[float] = Field(None, gt=0, le=1, description="Per-epoch lr factor")
    optimizer: OptimizerKind = Field(OptimizerKind.SGD, description="sgd or adadelta")
    hflip: bool = Field(False, description="Random horizontal flips of block and target")
    init_weights: Optional[ModelWeights] = Field(None, description="Start from these weights")


class TrainingResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: ModelWeights
    loss_trace: List[Tuple[int, float]] = Field(..., description="(epoch, mean loss) per epoch")
    initial_loss: float = Field(..., description="Loss of the first batch before any update")


def build_training_samples(
    seq: FrameSequence,
    labels: Sequence[BallLabel],
    t_prime: int,
    sigma_g: float = DEFAULT_SIGMA_G,
    label_size: Optional[Tuple[int, int]] = None,
) -> List[Sample]:
    """
    Pair every temporal block of a sequence with its ground-truth heatmaps.

    Args:
        seq: Frames at network resolution
        labels: One label per frame (matched by frame index)
        t_prime: Frames per block
        sigma_g: Gaussian std of the ground truth
        label_size: (width, height) the labels refer to, if not the frame size

    Returns:
        List of (block, (T', H, W) target array)

    Raises:
        FrameDataError: A frame has no label
    """
    by_frame = {label.frame_index: label for label in labels}
    missing = [idx for idx in seq.frame_indices if idx not in by_frame]
    if missing:
        raise FrameDataError(f"No label for frame(s) {missing[:10]}")
    size = (seq.width, seq.height)
    heatmaps = {}
    for idx in seq.frame_indices:
        label = by_frame[idx]
        if label_size is not None:
            label = scale_label(label, label_size, size)
        heatmaps[idx] = render_gt_heatmap(label, seq.width, seq.height, sigma_g)
    return [
        (block, np.stack([heatmaps[idx] for idx in block.frame_indices], axis=0))
        for block in make_blocks(seq, t_prime)
    ]


def _target_array(target: TargetLike) -> np.ndarray:
    maps = getattr(target, "maps", target)
    if isinstance(maps, torch.Tensor):
        maps = maps.detach().cpu().numpy()
    return np.asarray(maps, dtype=np.float64)


def _make_optimizer(model: TrackerNet, hyper: TrainingHyperParams) -> torch.optim.Optimizer:
    if hyper.optimizer == OptimizerKind.ADADELTA:
        return torch.optim.Adadelta(model.parameters(), lr=hyper.lr)
    return torch.optim.SGD(model.parameters(), lr=hyper.lr)


def train(dataset: Sequence[Sample], cfg: NetworkConfig, hyper: TrainingHyperParams) -> TrainingResult:
    """
    Train a tracker from scratch or fine-tune from `hyper.init_weights`.

    Samples are shuffled each epoch with a generator seeded from `hyper.seed`,
    so two runs with the same inputs give identical traces and weights.
    A fusion-enabled network initialized from a fusion-off model starts its
    motion prompt at the default slope and shift.

    Args:
        dataset: (block, target heatmaps) pairs consistent with `cfg`
        cfg: Network configuration
        hyper: Optimization settings

    Returns:
        TrainingResult with final weights and the per-epoch loss trace

    Raises:
        FrameDataError: Empty dataset or a target of the wrong shape
        ShapeMismatchError: A block does not match `cfg`
        NumericalAbortError: The loss became NaN or infinite
    """
    if not dataset:
        raise FrameDataError("Training dataset is empty")
    blocks = [block for block, _ in dataset]
    for block in blocks:
        check_block(block, cfg)
    targets = np.stack([_target_array(t) for _, t in dataset], axis=0)
    expected = (len(blocks), cfg.t_prime, cfg.input_height, cfg.input_width)
    if targets.shape != expected:
        raise FrameDataError(f"Targets have shape {targets.shape}, expected {expected}")

    torch.manual_seed(hyper.seed)
    rng = np.random.default_rng(hyper.seed)
    model = TrackerNet(cfg, seed=hyper.seed)
    if hyper.init_weights is not None:
        model.load_weights(hyper.init_weights, allow_missing_motion=True)
        logger.info(f"Fine-tuning from weights built with fusion_mode={hyper.init_weights.config.fusion_mode.value}")

    rgb, gray = block_tensors(blocks)
    y = torch.from_numpy(targets).to(torch.float32)
    optimizer = _make_optimizer(model, hyper)
    scheduler = (
        torch.optim.lr_scheduler.ExponentialLR(optimizer, gamma=hyper.lr_decay)
        if hyper.lr_decay is not None
        else None
    )

    n = len(blocks)
    trace: List[Tuple[int, float]] = []
    initial_loss: Optional[float] = None
    for epoch in range(1, hyper.epochs + 1):
        model.train()
        order = rng.permutation(n)
        running = 0.0
        for batch, start in enumerate(range(0, n, hyper.batch_size), start=1):
            idx = torch.from_numpy(order[start:start + hyper.batch_size])
            x_rgb, x_gray, target = rgb[idx], gray[idx], y[idx]
            if hyper.hflip:
                flip = torch.from_numpy(rng.random(len(idx)) < 0.5)
                x_rgb = torch.where(flip[:, None, None, None], x_rgb.flip(-1), x_rgb)
                x_gray = torch.where(flip[:, None, None, None], x_gray.flip(-1), x_gray)
                target = torch.where(flip[:, None, None, None], target.flip(-1), target)

            loss = wbce_from_logits(model(x_rgb, x_gray), target)
            if not torch.isfinite(loss):
                raise NumericalAbortError(
                    f"Non-finite loss at epoch {epoch}, batch {batch}", epoch=epoch, batch=batch
                )
            if initial_loss is None:
                initial_loss = float(loss.detach())

            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            model.clamp_parameters_()
            running += float(loss.detach()) * len(idx)
            logger.debug(f"epoch {epoch} batch {batch}: loss {float(loss.detach()):.6f}")

        epoch_loss = running / n
        trace.append((epoch, epoch_loss))
        if scheduler is not None:
            scheduler.step()
        logger.info(f"Epoch {epoch}/{hyper.epochs}: loss {epoch_loss:.6f}")

    if model.motion_prompt is not None:
        params = model.motion_prompt.params
        logger.info(f"Motion prompt after training: slope={params.slope:.4f}, shift={params.shift:.4f}")
    return TrainingResult(weights=model.to_weights(), loss_trace=trace, initial_loss=initial_loss)
