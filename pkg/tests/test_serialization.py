"""
Model file format: determinism, round trips and malformed input.
"""

import numpy as np
import pytest
import torch

from src.errors import FrameDataError, ShapeMismatchError
from src.tracker.config import FusionMode
from src.tracker.models import PN_SHIFT_KEY, PN_SLOPE_KEY, ModelWeights
from src.tracker.network import TrackerNet, predict_heatmaps
from src.tracker.serialization import MAGIC, decode_weights, encode_weights, load_model, save_model


def test_save_load_save_is_byte_identical(tmp_path, tiny_config):
    weights = TrackerNet(tiny_config, seed=5).to_weights()
    first = save_model(weights, tmp_path / "a.mtrk")
    second = save_model(load_model(first), tmp_path / "b.mtrk")
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes().startswith(MAGIC)


def test_round_trip_keeps_every_block_shape(tmp_path, tiny_config, tiny_block):
    weights = TrackerNet(tiny_config, seed=4).to_weights()
    loaded = load_model(save_model(weights, tmp_path / "m.mtrk"))
    assert list(loaded.tensors) == list(weights.tensors)
    for name, array in weights.tensors.items():
        assert loaded.tensors[name].shape == array.shape, name
    scalars = [name for name, array in weights.tensors.items() if array.ndim == 0]
    assert any(name.endswith("num_batches_tracked") for name in scalars)
    heatmaps = predict_heatmaps(tiny_block, TrackerNet.from_weights(loaded))
    assert len(heatmaps) == tiny_config.t_prime


def test_loaded_model_predicts_identically(tmp_path, tiny_config, tiny_block):
    model = TrackerNet(tiny_config, seed=2)
    loaded = TrackerNet.from_weights(load_model(save_model(model.to_weights(), tmp_path / "m.mtrk")))
    a = predict_heatmaps(tiny_block, model).numpy()
    b = predict_heatmaps(tiny_block, loaded).numpy()
    np.testing.assert_array_equal(a, b)


def test_config_echo(tiny_config):
    weights = decode_weights(encode_weights(TrackerNet(tiny_config).to_weights()))
    assert weights.config == tiny_config


@pytest.mark.parametrize("mode", list(FusionMode))
def test_pn_block_present_only_with_fusion(tiny_config, mode):
    cfg = tiny_config.model_copy(update={"fusion_mode": mode})
    weights = decode_weights(encode_weights(TrackerNet(cfg).to_weights()))
    assert (PN_SLOPE_KEY in weights.tensors) == (mode != FusionMode.OFF)
    assert (PN_SHIFT_KEY in weights.tensors) == (mode != FusionMode.OFF)


def test_bad_magic():
    with pytest.raises(FrameDataError):
        decode_weights(b"NOTAMODEL" + bytes(16))


def test_truncated_file(tiny_config):
    data = encode_weights(TrackerNet(tiny_config).to_weights())
    with pytest.raises(FrameDataError):
        decode_weights(data[: len(data) - 3])


def test_missing_file(tmp_path):
    with pytest.raises(FrameDataError):
        load_model(tmp_path / "nope.mtrk")


def test_weights_reject_non_finite(tiny_config):
    tensors = TrackerNet(tiny_config).to_weights().tensors
    name = next(iter(tensors))
    tensors[name] = np.full_like(tensors[name], np.nan)
    with pytest.raises(ValueError):
        ModelWeights(config=tiny_config, tensors=tensors)


def test_pn_presence_must_match_mode(tiny_config):
    tensors = TrackerNet(tiny_config).to_weights().tensors
    off = tiny_config.model_copy(update={"fusion_mode": FusionMode.OFF})
    with pytest.raises(ValueError):
        ModelWeights(config=off, tensors=tensors)


def test_load_into_wrong_topology(tiny_config):
    weights = TrackerNet(tiny_config).to_weights()
    wider = tiny_config.model_copy(update={"base_channels": 4})
    with pytest.raises(ShapeMismatchError):
        TrackerNet(wider).load_weights(weights)


def test_finetune_load_keeps_default_pn(tiny_config):
    off = tiny_config.model_copy(update={"fusion_mode": FusionMode.OFF})
    baseline = TrackerNet(off, seed=1).to_weights()
    model = TrackerNet(tiny_config, seed=3)
    model.load_weights(baseline, allow_missing_motion=True)
    assert model.motion_prompt.params.slope == pytest.approx(5.0)
    name = "backbone.head.weight"
    if name in baseline.tensors:
        assert torch.equal(model.state_dict()[name], torch.from_numpy(baseline.tensors[name]))
