"""
Deterministic synthetic fast-ball clips and Gaussian ground-truth heatmaps.
"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from .labels import write_labels
from .models import BackgroundMode, BallLabel, SynthConfig
from ..frames.loader import save_sequence
from ..frames.models import Frame, FrameSequence

logger = logging.getLogger(__name__)

DEFAULT_SIGMA_G = 2.5
DEFAULT_FPS = 30.0

BACKGROUND_RGB = np.array([0.20, 0.35, 0.25])
DISTRACTOR_GAIN = 0.6
# mean occlusion burst length is 1 / BURST_P frames
BURST_P = 1.0 / 3.0


def _background(cfg: SynthConfig) -> np.ndarray:
    # dimmed by (1 - contrast) so background + contrast never exceeds 1
    base = np.broadcast_to(BACKGROUND_RGB * (1.0 - cfg.contrast), (cfg.height, cfg.width, 3)).copy()
    if cfg.background_mode == BackgroundMode.GRADIENT:
        ramp = 0.6 + 0.8 * np.linspace(0.0, 1.0, cfg.width)
        base *= ramp[None, :, None]
    return base


def _disk_mask(shape: Tuple[int, ...], cx: int, cy: int, radius: int) -> np.ndarray:
    yy, xx = np.ogrid[:shape[0], :shape[1]]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2


def _reflect(pos: np.ndarray, vel: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> None:
    """Mirror position and velocity back inside [lo, hi] per axis, in place."""
    for axis in range(2):
        while pos[axis] < lo[axis] or pos[axis] > hi[axis]:
            if pos[axis] < lo[axis]:
                pos[axis] = 2 * lo[axis] - pos[axis]
            else:
                pos[axis] = 2 * hi[axis] - pos[axis]
            vel[axis] = -vel[axis]


def _initial_state(rng: np.random.Generator, lo, hi, speed_range) -> Tuple[np.ndarray, np.ndarray]:
    pos = rng.uniform(lo, hi)
    speed = rng.uniform(*speed_range)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return pos, speed * np.array([np.cos(angle), np.sin(angle)])


def occlusion_mask(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Per-frame hidden flags: Bernoulli(occlusion_prob), optionally extended
    into bursts of geometric length (mean 3 frames).
    """
    hidden = np.zeros(cfg.n_frames, dtype=bool)
    remaining = 0
    for t in range(cfg.n_frames):
        draw = rng.random()
        if remaining > 0:
            hidden[t] = True
            remaining -= 1
        elif draw < cfg.occlusion_prob:
            hidden[t] = True
            if cfg.occlusion_bursts:
                remaining = int(rng.geometric(BURST_P)) - 1
    return hidden


def generate_sequence(cfg: SynthConfig) -> Tuple[FrameSequence, List[BallLabel]]:
    """
    Render one clip of a small fast ball bouncing inside the frame.

    The ball moves linearly (or ballistically with `gravity`) and reflects at
    the borders. Hidden frames carry visibility 0 and no ball is drawn. In
    moving-distractor mode a larger, dimmer, unlabeled blob moves independently.

    Args:
        cfg: Generation parameters

    Returns:
        (FrameSequence of cfg.n_frames RGB frames numbered from 1, one BallLabel per frame)
    """
    rng = np.random.default_rng(cfg.seed)
    r = cfg.ball_radius
    lo = np.array([r, r], dtype=np.float64)
    hi = np.array([cfg.width - 1 - r, cfg.height - 1 - r], dtype=np.float64)

    background = _background(cfg)
    pos, vel = _initial_state(rng, lo, hi, cfg.speed_range)
    hidden = occlusion_mask(cfg, rng)

    distractor = cfg.background_mode == BackgroundMode.MOVING_DISTRACTOR
    if distractor:
        d_radius = 2 * r + 1
        d_lo = np.array([d_radius, d_radius], dtype=np.float64)
        d_hi = np.array([cfg.width - 1 - d_radius, cfg.height - 1 - d_radius], dtype=np.float64)
        d_pos, d_vel = _initial_state(
            rng, d_lo, np.maximum(d_hi, d_lo), (cfg.speed_min / 2, cfg.speed_max / 2)
        )

    frames: List[Frame] = []
    labels: List[BallLabel] = []
    for t in range(cfg.n_frames):
        frame = background.copy()
        if distractor:
            dx, dy = (int(v) for v in np.rint(d_pos))
            frame[_disk_mask(frame.shape, dx, dy, d_radius)] += DISTRACTOR_GAIN * cfg.contrast

        cx, cy = (int(v) for v in np.rint(pos))
        if hidden[t]:
            labels.append(BallLabel(frame_index=t + 1, visibility=0))
        else:
            # gray offset: the ball's luma is exactly background luma + contrast
            mask = _disk_mask(frame.shape, cx, cy, r)
            frame[mask] = background[mask] + cfg.contrast
            labels.append(BallLabel(frame_index=t + 1, visibility=1, x=cx, y=cy))

        if cfg.noise_sigma > 0:
            frame += rng.normal(0.0, cfg.noise_sigma, size=frame.shape)
        frames.append(Frame(data=np.clip(frame, 0.0, 1.0)))

        vel[1] += cfg.gravity
        pos += vel
        _reflect(pos, vel, lo, hi)
        if distractor:
            d_pos += d_vel
            _reflect(d_pos, d_vel, d_lo, np.maximum(d_hi, d_lo))

    seq = FrameSequence(frames=frames, frame_indices=list(range(1, cfg.n_frames + 1)), fps_hint=DEFAULT_FPS)
    visible = sum(label.visibility for label in labels)
    logger.debug(f"Generated {cfg.n_frames} frames (seed {cfg.seed}), {visible} visible")
    return seq, labels


def render_gt_heatmap(
    label: BallLabel,
    width: int,
    height: int,
    sigma_g: float = DEFAULT_SIGMA_G,
) -> np.ndarray:
    """
    Unnormalized Gaussian ground-truth heatmap.

    Args:
        label: Ball label
        width: Heatmap width
        height: Heatmap height
        sigma_g: Gaussian std in pixels

    Returns:
        (height, width) float64 array; all zeros when the ball is hidden,
        exactly 1.0 at an integer center

    Raises:
        ValueError: Non-positive sigma or a visible center outside the frame
    """
    if sigma_g <= 0:
        raise ValueError(f"sigma_g must be positive, got {sigma_g}")
    if not label.visible:
        return np.zeros((height, width), dtype=np.float64)
    if not (0 <= label.x < width and 0 <= label.y < height):
        raise ValueError(
            f"Frame {label.frame_index}: center ({label.x}, {label.y}) outside {width}x{height}"
        )
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    dist2 = (xx - label.x) ** 2 + (yy - label.y) ** 2
    return np.exp(-dist2 / (2.0 * sigma_g ** 2))


def write_clip(seq: FrameSequence, labels: List[BallLabel], out_dir: Union[str, Path]) -> Path:
    """Write PNG frames plus labels.csv into `out_dir`."""
    out = Path(out_dir)
    save_sequence(seq, out)
    write_labels(labels, out / "labels.csv")
    return out


def clip_config(cfg: SynthConfig, clip: int) -> SynthConfig:
    return cfg.model_copy(update={"seed": cfg.seed + clip, "n_clips": 1})


def write_dataset(cfg: SynthConfig, out_dir: Union[str, Path]) -> Dict[str, int]:
    """
    Generate and write a dataset.

    With n_clips = 1 the clip is written flat into `out_dir`; otherwise each
    clip goes to `clip_%03d/` (seed + clip number) and a manifest.csv lists
    them with a clip-level 70/30 assignment.

    Returns:
        Summary counts: clips, frames, visible, hidden
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"clips": 0, "frames": 0, "visible": 0, "hidden": 0}
    entries = []
    for clip in range(cfg.n_clips):
        seq, labels = generate_sequence(clip_config(cfg, clip))
        if cfg.n_clips == 1:
            write_clip(seq, labels, out)
        else:
            clip_id = f"clip_{clip:03d}"
            write_clip(seq, labels, out / clip_id)
            entries.append((clip_id, len(seq)))
        visible = sum(label.visibility for label in labels)
        summary["clips"] += 1
        summary["frames"] += len(seq)
        summary["visible"] += visible
        summary["hidden"] += len(labels) - visible

    if entries:
        _write_manifest(entries, out / "manifest.csv")
    logger.info(
        f"Wrote {summary['clips']} clip(s), {summary['frames']} frames to {out} "
        f"({summary['hidden']} hidden)"
    )
    return summary


def _write_manifest(entries: List[Tuple[str, int]], path: Path) -> None:
    from ..evaluation.io import write_manifest
    from ..evaluation.models import SplitEntry
    from ..evaluation.splits import split_clip_level

    manifest = split_clip_level(
        [SplitEntry(game_id="synth", clip_id=clip_id, frame_count=n) for clip_id, n in entries]
    )
    write_manifest(manifest, path)
