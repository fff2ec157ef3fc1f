"""
Pydantic models for detections, confusion counts, metrics and split manifests.
"""

from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Outcome(str, Enum):
    """Per-frame classification under the pixel-distance rule."""

    TP = "TP"  # visible, detected within tolerance
    TN = "TN"  # not visible, nothing detected
    FP1 = "FP1"  # visible, detected too far away
    FP2 = "FP2"  # not visible, something detected
    FN = "FN"  # visible, nothing detected


class Assignment(str, Enum):
    TRAIN = "train"
    TEST = "test"


def round_half_up(value: Optional[float], places: int = 1) -> Optional[float]:
    """Decimal half-up rounding of the shortest repr of `value`."""
    if value is None:
        return None
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


class Detection(BaseModel):
    """Decoded ball position for one frame; coordinates unset when absent."""

    frame_index: int = Field(..., description="Frame id")
    present: bool = Field(..., description="Whether a ball was detected")
    x: Optional[float] = Field(None, description="Detected center column")
    y: Optional[float] = Field(None, description="Detected center row")
    confidence: Optional[float] = Field(None, ge=0, le=1, description="Peak heatmap value")

    @model_validator(mode="after")
    def validate_presence(self):
        fields = (self.x, self.y, self.confidence)
        if self.present and any(v is None for v in fields):
            raise ValueError(f"Frame {self.frame_index}: present detection needs x, y, confidence")
        if not self.present and any(v is not None for v in fields):
            raise ValueError(f"Frame {self.frame_index}: absent detection must not carry x, y, confidence")
        return self

    @classmethod
    def absent(cls, frame_index: int) -> "Detection":
        return cls(frame_index=frame_index, present=False)


class ConfusionCounts(BaseModel):
    """Five-way confusion counts; they always sum to `total`."""

    tp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)
    fp1: int = Field(0, ge=0)
    fp2: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)
    total: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_closure(self):
        observed = self.tp + self.tn + self.fp1 + self.fp2 + self.fn
        if observed != self.total:
            raise ValueError(f"Counts sum to {observed}, total is {self.total}")
        return self

    def as_row(self) -> Dict[str, int]:
        return {
            "TP": self.tp,
            "TN": self.tn,
            "FP1": self.fp1,
            "FP2": self.fp2,
            "FN": self.fn,
            "Total": self.total,
        }


class MetricsReport(BaseModel):
    """
    Accuracy, precision, recall and F1 as percentages at full precision.
    None marks a metric whose denominator is zero.
    """

    accuracy: Optional[float] = Field(None, ge=0, le=100)
    precision: Optional[float] = Field(None, ge=0, le=100)
    recall: Optional[float] = Field(None, ge=0, le=100)
    f1: Optional[float] = Field(None, ge=0, le=100)

    def rounded(self, places: int = 1) -> Dict[str, Optional[float]]:
        return {
            "accuracy": round_half_up(self.accuracy, places),
            "precision": round_half_up(self.precision, places),
            "recall": round_half_up(self.recall, places),
            "f1": round_half_up(self.f1, places),
        }


class SplitEntry(BaseModel):
    """One clip of a split manifest."""

    game_id: str = Field(..., description="Game (match) identifier")
    clip_id: str = Field(..., description="Clip identifier, unique within the game")
    frame_count: int = Field(..., gt=0, description="Frames in the clip")
    assignment: Optional[Assignment] = Field(None, description="train or test, once split")


class SplitManifest(BaseModel):
    """Clips with their split assignment; a clip is never divided."""

    entries: List[SplitEntry] = Field(default_factory=list)

    @field_validator("entries")
    @classmethod
    def validate_unique(cls, v):
        seen = set()
        for entry in v:
            key = (entry.game_id, entry.clip_id)
            if key in seen:
                raise ValueError(f"Duplicate clip {entry.game_id}/{entry.clip_id}")
            seen.add(key)
        return v

    def frames(self, assignment: Assignment) -> int:
        return sum(e.frame_count for e in self.entries if e.assignment == assignment)

    @property
    def total_frames(self) -> int:
        return sum(e.frame_count for e in self.entries)

    @property
    def train_fraction(self) -> float:
        total = self.total_frames
        return self.frames(Assignment.TRAIN) / total if total else 0.0

    def clips(self, assignment: Assignment) -> List[SplitEntry]:
        return [e for e in self.entries if e.assignment == assignment]
