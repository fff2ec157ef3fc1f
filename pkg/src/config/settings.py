"""
Run configuration (flat `key = value` files) and process-level settings.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import ConfigError
from ..synth.generator import DEFAULT_SIGMA_G
from ..synth.models import BackgroundMode, SynthConfig
from ..tracker.config import FusionMode, NetworkConfig
from ..tracker.inference import OverlapPolicy
from ..tracker.training import DEFAULT_LR, OptimizerKind, TrainingHyperParams

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved_config.txt"

_NONE_VALUES = {"", "none", "null"}


class RunConfig(BaseModel):
    """
    Every knob a CLI run can set, flat. Defaults match the component defaults.
    """

    # network
    t_prime: int = Field(3, ge=2, description="Frames per temporal block")
    input_width: int = Field(128, gt=0, description="Network input width")
    input_height: int = Field(72, gt=0, description="Network input height")
    base_channels: int = Field(16, ge=1, description="First encoder level channels")
    levels: int = Field(3, ge=1, description="Encoder downsamplings")
    skip_connections: bool = Field(True, description="Decoder skip concatenation")
    fusion_mode: FusionMode = Field(FusionMode.V1, description="v1, v2 or off")

    # synthesis
    width: int = Field(128, gt=0, description="Synthetic frame width")
    height: int = Field(72, gt=0, description="Synthetic frame height")
    n_frames: int = Field(100, ge=1, description="Frames per synthetic clip")
    n_clips: int = Field(1, ge=1, description="Synthetic clips to write")
    ball_radius: int = Field(2, ge=1, description="Ball radius in pixels")
    speed_min: float = Field(4.0, gt=0, description="Minimum ball speed, px/frame")
    speed_max: float = Field(14.0, gt=0, description="Maximum ball speed, px/frame")
    gravity: float = Field(0.0, ge=0, description="Vertical acceleration, px/frame^2")
    contrast: float = Field(0.8, ge=0, le=1, description="Ball contrast")
    occlusion_prob: float = Field(0.0, ge=0, le=1, description="Per-frame occlusion probability")
    occlusion_bursts: bool = Field(False, description="Geometric occlusion bursts")
    noise_sigma: float = Field(0.0, ge=0, description="Gaussian pixel noise std")
    background_mode: BackgroundMode = Field(BackgroundMode.FLAT, description="Background style")
    sigma_g: float = Field(DEFAULT_SIGMA_G, gt=0, description="Ground-truth Gaussian std")

    # training
    lr: float = Field(DEFAULT_LR, gt=0, description="Learning rate")
    lr_decay: Optional[float] = Field(None, gt=0, le=1, description="Per-epoch lr factor")
    epochs: int = Field(30, ge=1, description="Training epochs")
    batch_size: int = Field(4, ge=1, description="Blocks per step")
    optimizer: OptimizerKind = Field(OptimizerKind.SGD, description="sgd or adadelta")
    hflip: bool = Field(False, description="Horizontal flip augmentation")

    # inference / evaluation
    threshold: float = Field(0.5, gt=0, lt=1, description="Heatmap decode threshold")
    tol: float = Field(4.0, gt=0, description="TP distance tolerance in pixels")
    overlap: OverlapPolicy = Field(OverlapPolicy.LAST, description="last or max")
    resize: bool = Field(False, description="Resize frames to network size")

    seed: int = Field(0, description="Global seed")

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(
            t_prime=self.t_prime,
            input_width=self.input_width,
            input_height=self.input_height,
            base_channels=self.base_channels,
            levels=self.levels,
            skip_connections=self.skip_connections,
            fusion_mode=self.fusion_mode,
        )

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            width=self.width,
            height=self.height,
            n_frames=self.n_frames,
            n_clips=self.n_clips,
            ball_radius=self.ball_radius,
            speed_min=self.speed_min,
            speed_max=self.speed_max,
            gravity=self.gravity,
            contrast=self.contrast,
            occlusion_prob=self.occlusion_prob,
            occlusion_bursts=self.occlusion_bursts,
            noise_sigma=self.noise_sigma,
            background_mode=self.background_mode,
            seed=self.seed,
        )

    def hyper_params(self, **overrides: Any) -> TrainingHyperParams:
        values = dict(
            lr=self.lr,
            lr_decay=self.lr_decay,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
            optimizer=self.optimizer,
            hflip=self.hflip,
        )
        values.update(overrides)
        return TrainingHyperParams(**values)

    def to_text(self) -> str:
        """`key = value` lines with sorted keys; None prints as `none`."""
        lines = []
        for key, value in sorted(self.model_dump(mode="json").items()):
            if value is None:
                text = "none"
            elif isinstance(value, bool):
                text = "true" if value else "false"
            else:
                text = str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Apply non-None overrides (e.g. command-line flags) with validation."""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return RunConfig(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid override: {e}") from e


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    """
    Parse `key = value` text.

    Blank lines and `#` comments are ignored; `none`, `null` or an empty
    value means None.

    Raises:
        ConfigError: Malformed line, unknown or repeated key, invalid value
    """
    values: Dict[str, Optional[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in RunConfig.model_fields:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: key '{key}' set twice")
        values[key] = None if value.lower() in _NONE_VALUES else value
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"{source}: {e}") from e


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Read a RunConfig file, or return the defaults when `path` is None.

    Raises:
        ConfigError: Missing file or invalid contents
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    config = parse_run_config(path.read_text(encoding="utf-8"), source=path.name)
    logger.info(f"Loaded run config from {path}")
    return config


class TrackerSettings(BaseSettings):
    """Process-level settings from TRACKNET_* environment variables or .env."""

    model_config = SettingsConfigDict(env_prefix="TRACKNET_", env_file=".env", extra="ignore")

    log_level: str = Field("INFO", description="Root log level")
    num_threads: int = Field(1, ge=1, description="torch intra-op threads")


_settings_instance: Optional[TrackerSettings] = None


def get_settings() -> TrackerSettings:
    """
    Get the global settings instance.

    Returns:
        TrackerSettings, read once per process
    """
    global _settings_instance
    if _settings_instance is None:
        load_dotenv()
        _settings_instance = TrackerSettings()
    return _settings_instance
