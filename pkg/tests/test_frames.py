"""
Frame loading, grayscale conversion and temporal blocks.
"""

import cv2
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import FrameDataError, ShapeMismatchError
from src.frames.blocks import make_blocks
from src.frames.loader import load_sequence, quantize_8bit, resize_frame, save_sequence, to_gray
from src.frames.models import Frame, FrameSequence

from tests.conftest import make_sequence, random_sequence


def _write_png(path, height, width, value=128):
    cv2.imwrite(str(path), np.full((height, width, 3), value, dtype=np.uint8))


def test_load_sequence_counts_and_sorts(tmp_path):
    for idx in (3, 1, 10, 2, 4, 5, 6, 7, 8, 9):
        _write_png(tmp_path / f"{idx:06d}.png", 64, 64, value=idx)
    seq = load_sequence(tmp_path)
    assert len(seq) == 10
    assert seq.frame_indices == list(range(1, 11))
    assert seq.frames[0].data[0, 0, 0] == pytest.approx(1 / 255)
    assert (seq.width, seq.height) == (64, 64)


def test_load_sequence_empty_dir(tmp_path):
    with pytest.raises(FrameDataError, match="no frames found"):
        load_sequence(tmp_path)


def test_load_sequence_missing_dir(tmp_path):
    with pytest.raises(FrameDataError, match="not found"):
        load_sequence(tmp_path / "nope")


def test_load_sequence_dimension_mismatch_names_file(tmp_path):
    _write_png(tmp_path / "000001.png", 64, 64)
    _write_png(tmp_path / "000002.png", 32, 32)
    with pytest.raises(FrameDataError, match="000002.png"):
        load_sequence(tmp_path)


def test_load_sequence_unreadable_file(tmp_path):
    _write_png(tmp_path / "000001.png", 8, 8)
    (tmp_path / "000002.png").write_bytes(b"not a png")
    with pytest.raises(FrameDataError, match="000002.png"):
        load_sequence(tmp_path)


def test_load_sequence_resizes(tmp_path):
    _write_png(tmp_path / "000001.png", 32, 64)
    seq = load_sequence(tmp_path, size=(16, 8))
    assert (seq.width, seq.height) == (16, 8)


def test_save_load_round_trip_is_exact_after_quantization(tmp_path):
    seq = random_sequence(4, height=8, width=12, seed=1)
    save_sequence(seq, tmp_path / "a")
    first = load_sequence(tmp_path / "a")
    np.testing.assert_allclose(first.as_array(), seq.as_array(), atol=0.5 / 255 + 1e-12)
    save_sequence(first, tmp_path / "b")
    second = load_sequence(tmp_path / "b")
    np.testing.assert_array_equal(second.as_array(), first.as_array())
    np.testing.assert_array_equal(quantize_8bit(first.as_array()) / 255.0, first.as_array())


@pytest.mark.parametrize(
    "rgb, expected",
    [((1.0, 1.0, 1.0), 1.0), ((0.0, 0.0, 0.0), 0.0), ((1.0, 0.0, 0.0), 0.299)],
)
def test_to_gray_luma(rgb, expected):
    frame = Frame(data=np.broadcast_to(np.array(rgb), (4, 5, 3)))
    gray = to_gray(frame)
    assert gray.channels == 1
    np.testing.assert_allclose(gray.data, expected, atol=1e-12)


def test_to_gray_rejects_gray_input():
    with pytest.raises(ShapeMismatchError):
        to_gray(Frame(data=np.zeros((4, 4))))


def test_to_gray_idempotent_on_replicated_gray():
    rng = np.random.default_rng(0)
    gray = rng.random((6, 7))
    frame = Frame(data=np.repeat(gray[:, :, None], 3, axis=2))
    np.testing.assert_allclose(to_gray(frame).data[:, :, 0], gray, atol=1e-12)


def test_frame_rejects_out_of_range():
    with pytest.raises(ValueError):
        Frame(data=np.full((2, 2, 3), 1.5))


def test_sequence_rejects_non_increasing_indices():
    frames = [Frame(data=np.zeros((2, 2, 3)))] * 2
    with pytest.raises(ValueError):
        FrameSequence(frames=frames, frame_indices=[2, 2])


def test_resize_keeps_channels():
    frame = Frame(data=np.zeros((8, 8)))
    assert resize_frame(frame, 4, 4).channels == 1


@pytest.mark.parametrize("total, t_prime, expected", [(10, 3, 8), (3, 3, 1)])
def test_make_blocks_count(total, t_prime, expected):
    blocks = make_blocks(random_sequence(total, height=4, width=4), t_prime)
    assert len(blocks) == expected
    assert blocks[0].frame_indices == list(range(1, t_prime + 1))


def test_make_blocks_too_short():
    with pytest.raises(FrameDataError, match="sequence shorter than block"):
        make_blocks(random_sequence(2, height=4, width=4), 3)


def test_make_blocks_rejects_t_prime_below_two():
    with pytest.raises(ValueError):
        make_blocks(random_sequence(4, height=4, width=4), 1)


def test_block_gray_view_is_luma_of_rgb():
    block = make_blocks(random_sequence(3, height=4, width=4), 3)[0]
    expected = block.rgb @ np.array([0.299, 0.587, 0.114])
    np.testing.assert_allclose(block.gray, np.clip(expected, 0, 1), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(total=st.integers(2, 12), t_prime=st.integers(2, 6))
def test_block_start_indices_cover_without_gaps(total, t_prime):
    seq = make_sequence(np.zeros((total, 2, 2, 3)))
    if total < t_prime:
        with pytest.raises(FrameDataError):
            make_blocks(seq, t_prime)
        return
    blocks = make_blocks(seq, t_prime)
    assert [b.start_index for b in blocks] == list(range(1, total - t_prime + 2))
    for b in blocks:
        assert b.frame_indices == list(range(b.start_index, b.start_index + t_prime))
