"""
Single-file model format.

Layout (all integers little-endian uint32):
    b"MTRK1"
    header length, header bytes: compact UTF-8 JSON {"config": ..., "version": ...}
    then, until end of file, one record per parameter block in state-dict order:
        name length, name (UTF-8), rank, rank x dim, prod(dims) float32 LE values

Every value is stored as float32, including batch-norm counters, which are
cast back to the network's dtype on load.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from .config import NetworkConfig
from .models import MODEL_VERSION, ModelWeights
from ..errors import FrameDataError
from ..utils.io import write_bytes_atomic

logger = logging.getLogger(__name__)

MAGIC = MODEL_VERSION.encode("ascii")
_U32 = struct.Struct("<I")
_F32 = np.dtype("<f4")


def encode_weights(weights: ModelWeights) -> bytes:
    """Serialize weights to bytes; equal weights always give equal bytes."""
    header = json.dumps(
        {"config": weights.config.model_dump(mode="json"), "version": weights.version},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    parts = [MAGIC, _U32.pack(len(header)), header]
    for name, array in weights.tensors.items():
        encoded_name = name.encode("utf-8")
        data = np.asarray(array, dtype=_F32)
        parts.append(_U32.pack(len(encoded_name)))
        parts.append(encoded_name)
        parts.append(_U32.pack(data.ndim))
        parts.extend(_U32.pack(dim) for dim in data.shape)
        parts.append(data.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes, source: str):
        self.data = data
        self.pos = 0
        self.source = source

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FrameDataError(f"Truncated model file {self.source} at byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(_U32.size))[0]

    @property
    def done(self) -> bool:
        return self.pos >= len(self.data)


def decode_weights(data: bytes, source: str = "<bytes>") -> ModelWeights:
    """
    Parse bytes produced by `encode_weights`.

    Raises:
        FrameDataError: Bad magic, truncated data or an invalid header
    """
    reader = _Reader(data, source)
    if reader.take(len(MAGIC)) != MAGIC:
        raise FrameDataError(f"{source} is not a {MODEL_VERSION} model file")
    try:
        header = json.loads(reader.take(reader.u32()).decode("utf-8"))
        config = NetworkConfig(**header["config"])
        version = header["version"]
    except (KeyError, ValueError, TypeError) as e:
        raise FrameDataError(f"Invalid header in {source}: {e}") from e

    tensors: Dict[str, np.ndarray] = {}
    while not reader.done:
        name = reader.take(reader.u32()).decode("utf-8")
        rank = reader.u32()
        shape: Tuple[int, ...] = tuple(reader.u32() for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64)) if rank else 1
        raw = reader.take(count * _F32.itemsize)
        tensors[name] = np.frombuffer(raw, dtype=_F32).reshape(shape).astype(np.float32)
    try:
        return ModelWeights(version=version, config=config, tensors=tensors)
    except ValueError as e:
        raise FrameDataError(f"Invalid weights in {source}: {e}") from e


def save_model(weights: ModelWeights, path: Union[str, Path]) -> Path:
    """Write a model file atomically."""
    data = encode_weights(weights)
    write_bytes_atomic(path, data)
    logger.info(f"Saved model ({len(weights.tensors)} blocks, {len(data)} bytes) to {path}")
    return Path(path)


def load_model(path: Union[str, Path]) -> ModelWeights:
    """
    Read a model file.

    Raises:
        FrameDataError: Missing or malformed file
    """
    path = Path(path)
    if not path.is_file():
        raise FrameDataError(f"Model file not found: {path}")
    weights = decode_weights(path.read_bytes(), source=path.name)
    logger.info(f"Loaded model {path.name}: fusion_mode={weights.config.fusion_mode.value}")
    return weights
