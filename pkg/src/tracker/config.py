"""
Network configuration for the heatmap tracker.
"""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class FusionMode(str, Enum):
    """How motion attention is fused with the visual feature maps."""

    V1 = "v1"  # first slice unmodulated, slice tau scaled by attention tau-1
    V2 = "v2"  # every slice scaled by the mean attention map
    OFF = "off"  # plain visual baseline, no motion prompt


class NetworkConfig(BaseModel):
    """
    Shape and topology of the encoder-decoder tracker.
    Input is T' stacked RGB frames (3 T' channels), output T' heatmaps.
    """

    t_prime: int = Field(3, ge=2, description="Frames per temporal block")
    input_width: int = Field(128, gt=0, description="Network input width in pixels")
    input_height: int = Field(72, gt=0, description="Network input height in pixels")
    base_channels: int = Field(16, ge=1, description="Channels of the first encoder level")
    levels: int = Field(3, ge=1, description="Number of 2x downsamplings in the encoder")
    skip_connections: bool = Field(True, description="Concatenate encoder features in the decoder")
    fusion_mode: FusionMode = Field(FusionMode.V1, description="Motion fusion variant")

    @model_validator(mode="after")
    def validate_divisibility(self):
        """Input dims must survive `levels` halvings exactly."""
        factor = 2 ** self.levels
        if self.input_width % factor or self.input_height % factor:
            raise ValueError(
                f"Input {self.input_width}x{self.input_height} must be divisible by "
                f"2^levels = {factor}"
            )
        return self

    @property
    def size(self) -> tuple:
        """(width, height) of the network input."""
        return (self.input_width, self.input_height)

    @property
    def uses_motion(self) -> bool:
        return self.fusion_mode != FusionMode.OFF
