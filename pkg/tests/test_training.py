"""
Training loop: determinism, overfitting, fine-tuning and failure modes.
"""

import math

import numpy as np
import pytest

from src.errors import FrameDataError, NumericalAbortError, ShapeMismatchError
from src.evaluation.similarity import weights_cosine_similarity
from src.frames.blocks import make_blocks
from src.synth.generator import render_gt_heatmap
from src.synth.models import BallLabel
from src.tracker.config import FusionMode
from src.tracker.network import TrackerNet
from src.tracker.training import (
    OptimizerKind,
    TrainingHyperParams,
    build_training_samples,
    train,
)

from tests.conftest import make_sequence, random_sequence


def _one_sample(seed=0):
    block = make_blocks(random_sequence(3, seed=seed), 3)[0]
    label = BallLabel(frame_index=1, visibility=1, x=8, y=8)
    target = np.stack([render_gt_heatmap(label, 16, 16)] * 3)
    return [(block, target)]


def test_empty_dataset(tiny_config):
    with pytest.raises(FrameDataError):
        train([], tiny_config, TrainingHyperParams(epochs=1))


def test_target_shape_checked(tiny_config):
    block, _ = _one_sample()[0]
    with pytest.raises(FrameDataError):
        train([(block, np.zeros((2, 16, 16)))], tiny_config, TrainingHyperParams(epochs=1))


def test_block_shape_checked(tiny_config):
    block = make_blocks(random_sequence(3, height=8, width=8), 3)[0]
    with pytest.raises(ShapeMismatchError):
        train([(block, np.zeros((3, 8, 8)))], tiny_config, TrainingHyperParams(epochs=1))


def test_same_seed_same_trace(tiny_config):
    data = _one_sample() + _one_sample(seed=1)
    hyper = TrainingHyperParams(epochs=3, batch_size=1, lr=0.1, seed=4, hflip=True)
    a = train(data, tiny_config, hyper)
    b = train(data, tiny_config, hyper)
    assert a.loss_trace == b.loss_trace
    assert [e for e, _ in a.loss_trace] == [1, 2, 3]
    for name in a.weights.tensors:
        np.testing.assert_array_equal(a.weights.tensors[name], b.weights.tensors[name])


@pytest.mark.slow
def test_overfits_one_sample(tiny_config):
    hyper = TrainingHyperParams(epochs=50, batch_size=1, lr=0.5, seed=0)
    result = train(_one_sample(), tiny_config, hyper)
    assert result.loss_trace[-1][1] < result.loss_trace[0][1]
    assert result.loss_trace[-1][1] < result.initial_loss


def test_adadelta_with_decay_runs(tiny_config):
    hyper = TrainingHyperParams(epochs=2, optimizer=OptimizerKind.ADADELTA, lr_decay=0.9)
    result = train(_one_sample(), tiny_config, hyper)
    assert all(math.isfinite(loss) for _, loss in result.loss_trace)


def test_nan_loss_aborts_with_location(tiny_config, monkeypatch):
    import src.tracker.training as training

    real = training.wbce_from_logits
    calls = []

    def poisoned(logits, target):
        calls.append(1)
        loss = real(logits, target)
        return loss * float("nan") if len(calls) == 2 else loss

    monkeypatch.setattr(training, "wbce_from_logits", poisoned)
    hyper = TrainingHyperParams(epochs=3, batch_size=1)
    with pytest.raises(NumericalAbortError) as info:
        train(_one_sample() + _one_sample(seed=2), tiny_config, hyper)
    assert (info.value.epoch, info.value.batch) == (1, 2)


def test_finetune_from_baseline_moves_pn_params(tiny_config):
    base_cfg = tiny_config.model_copy(update={"fusion_mode": FusionMode.OFF})
    baseline = train(_one_sample(), base_cfg, TrainingHyperParams(epochs=1, lr=0.1)).weights
    assert "motion_prompt.slope" not in baseline.tensors

    hyper = TrainingHyperParams(epochs=3, lr=0.05, init_weights=baseline)
    tuned = train(_one_sample(), tiny_config, hyper)
    slope = float(tuned.weights.tensors["motion_prompt.slope"])
    shift = float(tuned.weights.tensors["motion_prompt.shift"])
    assert (slope, shift) != (5.0, 0.25)
    assert all(math.isfinite(loss) for _, loss in tuned.loss_trace)


def test_init_weights_load_exactly(tiny_config):
    source = TrackerNet(tiny_config, seed=99).to_weights()
    model = TrackerNet(tiny_config, seed=1)
    model.load_weights(source)
    sims = weights_cosine_similarity(source, model.to_weights())
    assert all(s.cosine == pytest.approx(1.0) for s in sims)


def test_build_training_samples(synth_clip):
    seq, labels = synth_clip
    samples = build_training_samples(seq, labels, t_prime=3)
    assert len(samples) == len(seq) - 2
    block, target = samples[0]
    assert target.shape == (3, seq.height, seq.width)
    first = labels[0]
    if first.visible:
        assert target[0, int(first.y), int(first.x)] == pytest.approx(1.0)
    else:
        assert not target[0].any()


def test_build_training_samples_rescales_labels():
    seq = make_sequence(np.zeros((3, 8, 8, 3)))
    labels = [BallLabel(frame_index=i, visibility=1, x=6.5, y=6.5) for i in (1, 2, 3)]
    samples = build_training_samples(seq, labels, 3, label_size=(16, 16))
    target = samples[0][1][0]
    assert np.unravel_index(np.argmax(target), target.shape) == (3, 3)


def test_build_training_samples_missing_label(synth_clip):
    seq, labels = synth_clip
    with pytest.raises(FrameDataError):
        build_training_samples(seq, labels[1:], t_prime=3)


