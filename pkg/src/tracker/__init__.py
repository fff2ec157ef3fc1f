"""
Heatmap tracker: visual backbone, motion-aware fusion, loss, training and
model files. Sequence-level tracking lives in `src.tracker.inference`.
"""

from .config import FusionMode, NetworkConfig
from .models import FeatureStack, HeatmapStack, LossReport, ModelWeights
from .fusion import fuse, fuse_v1, fuse_v2
from .network import TrackerNet, extract_features, predict_heatmaps
from .loss import wbce_loss, wbce_logit_grad
from .training import TrainingHyperParams, TrainingResult, build_training_samples, train
from .serialization import load_model, save_model

__all__ = [
    "FusionMode",
    "NetworkConfig",
    "FeatureStack",
    "HeatmapStack",
    "LossReport",
    "ModelWeights",
    "fuse",
    "fuse_v1",
    "fuse_v2",
    "TrackerNet",
    "extract_features",
    "predict_heatmaps",
    "wbce_loss",
    "wbce_logit_grad",
    "TrainingHyperParams",
    "TrainingResult",
    "build_training_samples",
    "train",
    "load_model",
    "save_model",
]
