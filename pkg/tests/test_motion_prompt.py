"""
Frame differencing, the PN curve, its analytic gradients and the torch layer.
"""

import numpy as np
import pytest
import torch
from hypothesis import given, settings, strategies as st
from scipy.special import expit

from src.frames.blocks import make_blocks
from src.frames.models import TemporalBlock
from src.motion.prompt import (
    DEFAULT_SHIFT,
    DEFAULT_SLOPE,
    MIN_SLOPE,
    AttentionStack,
    DiffStack,
    MotionPromptLayer,
    PNParams,
    attention,
    frame_diff,
    pn_forward,
    pn_grad,
    prompted_frames,
)

from tests.conftest import make_sequence

LEARNED = PNParams(slope=16.24, shift=0.28)


def _gray_block(values):
    """Block whose gray frames are uniform images of the given values."""
    rgb = np.stack([np.full((2, 2, 3), v) for v in values])
    return make_blocks(make_sequence(rgb), len(values))[0]


def _logistic_diff(z_hi, z_lo):
    """expit(z_hi) - expit(z_lo), evaluated on the complementary side when both are positive."""
    if z_hi > 0 and z_lo > 0:
        return expit(-z_lo) - expit(-z_hi)
    return expit(z_hi) - expit(z_lo)


def test_frame_diff_static_scene():
    diffs = frame_diff(_gray_block([0.4, 0.4]))
    assert not diffs.signed.any()
    assert not diffs.absolute.any()


def test_frame_diff_signs():
    up = frame_diff(_gray_block([0.2, 0.7]))
    down = frame_diff(_gray_block([0.7, 0.2]))
    np.testing.assert_allclose(up.signed, 0.5, atol=1e-12)
    np.testing.assert_allclose(down.signed, -0.5, atol=1e-12)
    np.testing.assert_allclose(down.absolute, 0.5, atol=1e-12)


def test_frame_diff_slice_count():
    assert len(frame_diff(_gray_block([0.1, 0.2, 0.3]))) == 2


def test_diff_stack_requires_absolute_of_signed():
    with pytest.raises(ValueError):
        DiffStack(signed=np.full((1, 2, 2), -0.5), absolute=np.full((1, 2, 2), 0.4))


@pytest.mark.parametrize(
    "d, expected, tol",
    [(0.28, 0.5, 1e-12), (0.0, 0.010486, 1e-5), (1.0, 0.999991, 1e-5)],
)
def test_pn_forward_reference_points(d, expected, tol):
    assert pn_forward(d, LEARNED) == pytest.approx(expected, abs=tol)


def test_pn_forward_stays_open_interval():
    extreme = PNParams(slope=1000.0, shift=0.5)
    values = pn_forward(np.array([-10.0, 0.0, 1.0, 10.0]), extreme)
    assert np.all(values > 0) and np.all(values < 1)


def test_pn_params_defaults_and_validation():
    params = PNParams()
    assert (params.slope, params.shift) == (DEFAULT_SLOPE, DEFAULT_SHIFT)
    with pytest.raises(ValueError):
        PNParams(slope=-1.0)
    with pytest.raises(ValueError):
        PNParams(shift=float("nan"))


def test_attention_of_zero_diffs_is_constant():
    attn = attention(frame_diff(_gray_block([0.3, 0.3, 0.3])), LEARNED)
    assert len(attn) == 2
    np.testing.assert_allclose(attn.maps, pn_forward(0.0, LEARNED))


def test_attention_stack_rejects_closed_bounds():
    with pytest.raises(ValueError):
        AttentionStack(maps=np.ones((1, 2, 2)))


@settings(max_examples=50, deadline=None)
@given(
    x=st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4),
    bump=st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4),
)
def test_attention_monotone(x, bump):
    lo = np.array(x).reshape(1, 2, 2)
    hi = np.minimum(lo + np.array(bump).reshape(1, 2, 2), 1.0)
    a_lo = attention(DiffStack(signed=lo, absolute=lo), LEARNED).maps
    a_hi = attention(DiffStack(signed=hi, absolute=hi), LEARNED).maps
    assert np.all(a_hi >= a_lo)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
def test_attention_sign_symmetry(values):
    signed = np.array(values).reshape(1, 2, 2)
    pos = attention(DiffStack(signed=signed, absolute=np.abs(signed)), LEARNED)
    neg = attention(DiffStack(signed=-signed, absolute=np.abs(-signed)), LEARNED)
    np.testing.assert_array_equal(pos.maps, neg.maps)


def test_pn_grad_zero_slope_gradient_at_shift():
    d_slope, _, _ = pn_grad(LEARNED.shift, LEARNED)
    assert d_slope == 0.0


def test_pn_grad_zero_upstream():
    assert pn_grad(0.5, LEARNED, upstream=0.0) == (0.0, 0.0, 0.0)


def test_pn_grad_matches_finite_differences():
    rng = np.random.default_rng(2024)
    h = 1e-5
    for _ in range(100):
        slope = rng.uniform(0.5, 30.0)
        shift = rng.uniform(0.0, 1.0)
        d = rng.uniform(0.0, 1.0)
        params = PNParams(slope=slope, shift=shift)
        an_slope, an_shift, an_input = pn_grad(d, params)

        def fd(z_hi, z_lo):
            return _logistic_diff(z_hi, z_lo) / (2 * h)

        fd_slope = fd((slope + h) * (d - shift), (slope - h) * (d - shift))
        fd_shift = fd(slope * (d - shift - h), slope * (d - shift + h))
        fd_input = fd(slope * (d + h - shift), slope * (d - h - shift))
        for numeric, an in ((fd_slope, an_slope), (fd_shift, an_shift), (fd_input, an_input)):
            assert abs(numeric - an) <= 1e-4 * max(abs(an), 1e-10) + 1e-12


def test_pn_grad_sums_over_stack():
    d = np.array([[0.1, 0.5], [0.9, 0.3]])
    upstream = np.array([[1.0, -2.0], [0.5, 3.0]])
    total = pn_grad(d, LEARNED, upstream)
    parts = [pn_grad(v, LEARNED, u) for v, u in zip(d.ravel(), upstream.ravel())]
    assert total[0] == pytest.approx(sum(p[0] for p in parts))
    assert total[1] == pytest.approx(sum(p[1] for p in parts))
    np.testing.assert_allclose(total[2].ravel(), [p[2] for p in parts])


def test_layer_autograd_agrees_with_pn_grad():
    layer = MotionPromptLayer(LEARNED).double()
    rng = np.random.default_rng(5)
    gray = torch.from_numpy(rng.random((1, 3, 4, 4)))
    upstream = torch.from_numpy(rng.standard_normal((1, 2, 4, 4)))
    (layer(gray) * upstream).sum().backward()

    absolute = np.abs(np.diff(gray.numpy()[0], axis=0))
    d_slope, d_shift, _ = pn_grad(absolute, layer.params, upstream.numpy()[0])
    assert layer.slope.grad.item() == pytest.approx(d_slope, rel=1e-9)
    assert layer.shift.grad.item() == pytest.approx(d_shift, rel=1e-9)


def test_layer_matches_numpy_attention():
    block = _gray_block([0.1, 0.6, 0.2])
    layer = MotionPromptLayer(LEARNED).double()
    with torch.no_grad():
        out = layer(torch.from_numpy(block.gray[None]))[0].numpy()
    np.testing.assert_allclose(out, attention(frame_diff(block), layer.params).maps, atol=1e-12)


def test_clamp_slope_keeps_minimum():
    layer = MotionPromptLayer()
    with torch.no_grad():
        layer.slope.fill_(-3.0)
    layer.clamp_slope_()
    assert layer.slope.item() == pytest.approx(MIN_SLOPE)
    assert layer.params.slope == pytest.approx(MIN_SLOPE)


def test_prompted_frames_all_ones_attention_is_identity():
    rng = np.random.default_rng(0)
    block = TemporalBlock(rgb=rng.random((2, 3, 3, 3)), gray=rng.random((2, 3, 3)), start_index=1)
    ones = AttentionStack.model_construct(maps=np.ones((1, 3, 3)))
    np.testing.assert_array_equal(prompted_frames(block, ones), block.rgb[1:])
