"""
Per-layer cosine similarity between two sets of weights.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from pydantic import BaseModel, Field  # noqa: E402

from ..errors import ShapeMismatchError  # noqa: E402
from ..tracker.models import PN_SHIFT_KEY, PN_SLOPE_KEY, ModelWeights, is_trainable_block  # noqa: E402

logger = logging.getLogger(__name__)


class LayerSimilarity(BaseModel):
    name: str = Field(..., description="Parameter block name")
    cosine: float = Field(..., ge=-1, le=1, description="Cosine of the flattened blocks")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two flattened arrays; two zero vectors count as identical, one as orthogonal."""
    u = np.asarray(a, dtype=np.float64).ravel()
    v = np.asarray(b, dtype=np.float64).ravel()
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 and nv == 0:
        return 1.0
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def weights_cosine_similarity(a: ModelWeights, b: ModelWeights) -> List[LayerSimilarity]:
    """
    Cosine similarity of every trainable block (running statistics excluded).

    Motion-prompt parameters present in only one of the two models are
    skipped, so a baseline can be compared with its fine-tuned fusion model.

    Raises:
        ShapeMismatchError: Other block names differ, or shapes differ
    """
    pn_keys = {PN_SLOPE_KEY, PN_SHIFT_KEY}
    names_a = [n for n in a.trainable_names() if not (n in pn_keys and n not in b.tensors)]
    names_b = [n for n in b.trainable_names() if not (n in pn_keys and n not in a.tensors)]
    if names_a != names_b:
        only_a = sorted(set(names_a) - set(names_b))
        only_b = sorted(set(names_b) - set(names_a))
        raise ShapeMismatchError(f"Block names differ: only in first {only_a}, only in second {only_b}")

    result = []
    for name in names_a:
        if a.tensors[name].shape != b.tensors[name].shape:
            raise ShapeMismatchError(
                f"Block {name}: shapes {a.tensors[name].shape} and {b.tensors[name].shape} differ"
            )
        result.append(LayerSimilarity(name=name, cosine=cosine(a.tensors[name], b.tensors[name])))
    logger.debug(f"Compared {len(result)} trainable blocks")
    return result


def plot_layer_similarity(similarities: Sequence[LayerSimilarity], path: Union[str, Path]) -> Path:
    """Bar chart of per-layer cosine similarity, written as PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(similarities)), 4.0))
    ax.bar(range(len(similarities)), [s.cosine for s in similarities], color="steelblue")
    ax.set_xticks(range(len(similarities)))
    ax.set_xticklabels([s.name for s in similarities], rotation=90, fontsize=6)
    ax.set_ylim(-1.05, 1.05)
    ax.set_ylabel("cosine similarity")
    ax.axhline(0.0, color="gray", linewidth=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info(f"Saved similarity plot to {path}")
    return path
