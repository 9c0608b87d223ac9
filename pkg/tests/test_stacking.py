"""Temporal stack projection: oracles, invariants, and the op-count model.

The flop model is checked against a scalar reference implementation
that increments a counter at every arithmetic operation it performs;
the closed form must match that counter exactly, not approximately.
"""

import math

import numpy as np
import pytest

from timestack.color import YIQ_TO_RGB, rgb_to_yiq
from timestack.probe import hue_to_time
from timestack.scenes import random_spec, render
from timestack.stacking import (
    CHROMA_CEIL,
    CHROMA_GAIN,
    LUMA_CAP,
    StackParams,
    background_mean,
    flop_estimate,
    foreground,
    hue_layers,
    motion_mask,
    stack_video,
)


def _instrumented_stack(video, params):
    """Scalar stack_video twin that counts every arithmetic op.

    Counting convention: one op per scalar add/sub/mul/div/abs/compare
    (min, max and clip bounds each count one compare), running maxima
    start from a -inf sentinel so every element costs one compare per
    frame, and per-frame angle setup is divide, scale, deg2rad, cos,
    sin. Returns (image, mask, op_count).
    """
    t_count, h, w, _ = video.shape
    m = YIQ_TO_RGB
    n = 0

    bg = [[[0.0] * 3 for _ in range(w)] for _ in range(h)]
    for t in range(t_count):
        for r in range(h):
            for c in range(w):
                for ch in range(3):
                    bg[r][c][ch] += video[t, r, c, ch]
                    n += 1
    for r in range(h):
        for c in range(w):
            for ch in range(3):
                bg[r][c][ch] /= t_count
                n += 1

    energy = np.empty((t_count, h, w))
    for t in range(t_count):
        for r in range(h):
            for c in range(w):
                d = [0.0] * 3
                for ch in range(3):
                    d[ch] = video[t, r, c, ch] - bg[r][c][ch]
                    n += 1
                    d[ch] = abs(d[ch])
                    n += 1
                s = d[0] + d[1]
                n += 1
                s = s + d[2]
                n += 1
                energy[t, r, c] = s / 3.0
                n += 1

    mask = np.zeros((h, w), dtype=bool)
    for r in range(h):
        for c in range(w):
            emax = -math.inf
            for t in range(t_count):
                if energy[t, r, c] > emax:
                    emax = energy[t, r, c]
                n += 1
            mask[r, c] = emax > params.tau
            n += 1

    img = np.full((h, w, 3), -math.inf)
    for t in range(t_count):
        frac = (t + 1) / t_count
        n += 1
        theta_deg = frac * params.theta_max
        n += 1
        theta = math.radians(theta_deg)
        n += 1
        co = math.cos(theta)
        n += 1
        si = math.sin(theta)
        n += 1
        for r in range(h):
            for c in range(w):
                v = energy[t, r, c]
                luma = min(v, LUMA_CAP)
                n += 1
                chroma = v * CHROMA_GAIN
                n += 1
                chroma = min(chroma, CHROMA_CEIL)
                n += 1
                i_val = chroma * co
                n += 1
                q_val = chroma * si
                n += 1
                for ch in range(3):
                    a = m[ch, 0] * luma
                    n += 1
                    b = m[ch, 1] * i_val
                    n += 1
                    d = m[ch, 2] * q_val
                    n += 1
                    s = a + b
                    n += 1
                    s = s + d
                    n += 1
                    s = max(s, 0.0)
                    n += 1
                    s = min(s, 1.0)
                    n += 1
                    if s > img[r, c, ch]:
                        img[r, c, ch] = s
                    n += 1
    return img, mask, n


# ------------------------------------------------------------- components


def test_background_mean_is_per_pixel_temporal_average():
    video = np.zeros((4, 2, 2, 3))
    video[:, 0, 0, 0] = [0.0, 1.0, 1.0, 0.0]
    video[:, 1, 1, 2] = [0.2, 0.4, 0.6, 0.8]
    bg = background_mean(video)
    assert bg.shape == (2, 2, 3)
    assert bg[0, 0, 0] == pytest.approx(0.5)
    assert bg[1, 1, 2] == pytest.approx(0.5)
    assert bg[0, 1, 1] == 0.0


def test_background_mean_rejects_non_video():
    with pytest.raises(ValueError):
        background_mean(np.zeros((4, 4, 3)))


def test_foreground_folds_sign():
    video = np.zeros((2, 1, 1, 3))
    video[0, 0, 0] = [0.2, 0.2, 0.2]
    video[1, 0, 0] = [0.8, 0.8, 0.8]
    bg = background_mean(video)
    fg = foreground(video, bg)
    assert np.allclose(fg, 0.3)


def test_foreground_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        foreground(np.zeros((2, 4, 4, 3)), np.zeros((5, 4, 3)))


def test_motion_mask_threshold_is_strict():
    tau = 0.06
    video = np.zeros((2, 1, 2, 3))
    video[1, 0, 0] = 2 * tau  # energy peak exactly tau
    video[1, 0, 1] = 2 * tau + 0.02  # peak tau + 0.01
    fg = foreground(video, background_mean(video))
    mask = motion_mask(fg, tau)
    assert not mask[0, 0]
    assert mask[0, 1]


def test_static_video_stacks_to_black():
    video = np.full((6, 5, 5, 3), 0.4)
    img, mask = stack_video(video)
    assert not mask.any()
    assert np.allclose(img, 0.0, atol=1e-12)  # mean() rounding residue


def test_single_frame_video_has_no_motion():
    rng = np.random.default_rng(3)
    video = rng.uniform(size=(1, 4, 4, 3))
    img, mask = stack_video(video)
    assert not mask.any()
    assert np.all(img == 0.0)


# ------------------------------------------------------------ hue coding


def test_hue_layer_angle_decodes_to_frame_time():
    t_count = 8
    energy = np.zeros((t_count, 1, 1))
    for t in range(t_count):
        energy[:] = 0.0
        energy[t, 0, 0] = 0.5
        layers = hue_layers(energy, 270.0)
        decoded = hue_to_time(layers[t, 0, 0], theta_max=270.0)
        assert decoded == pytest.approx((t + 1) / t_count, abs=1e-9)


def test_hue_layers_zero_energy_is_black():
    layers = hue_layers(np.zeros((3, 2, 2)), 270.0)
    assert np.all(layers == 0.0)


def test_hue_layers_stay_in_gamut_without_clipping():
    rng = np.random.default_rng(7)
    energy = rng.uniform(0.0, 0.999, size=(5, 6, 6))
    layers = hue_layers(energy, 270.0)
    t_idx = np.arange(1, 6)
    theta = np.deg2rad(t_idx / 5 * 270.0)
    luma = np.minimum(energy, LUMA_CAP)
    chroma = np.minimum(CHROMA_GAIN * energy, CHROMA_CEIL)
    yiq = np.stack(
        [
            luma,
            chroma * np.cos(theta)[:, None, None],
            chroma * np.sin(theta)[:, None, None],
        ],
        axis=-1,
    )
    raw = yiq @ YIQ_TO_RGB.T
    assert np.allclose(layers, raw, atol=1e-12)  # clip never binds
    assert layers.min() >= 0.0 and layers.max() <= 1.0


def test_hue_layers_chroma_follows_gain_then_ceiling():
    energy = np.array([[[0.2]], [[0.9]]])
    layers = hue_layers(energy, 270.0)
    yiq = rgb_to_yiq(layers)
    mag = np.hypot(yiq[..., 1], yiq[..., 2])
    assert mag[0, 0, 0] == pytest.approx(CHROMA_GAIN * 0.2, abs=1e-12)
    assert mag[1, 0, 0] == pytest.approx(CHROMA_CEIL, abs=1e-12)


def test_bright_cover_beats_background_ghost():
    # a pixel touched once by a bright mover also carries faint
    # "ghost" energy at every other frame (the background mean shift);
    # the covered frame must win the projection in all three channels
    t_count, t_cover, g = 8, 2, 0.9
    video = np.zeros((t_count, 1, 1, 3))
    video[t_cover, 0, 0] = g
    img, mask = stack_video(video)
    assert mask[0, 0]
    decoded = hue_to_time(img[0, 0], theta_max=270.0)
    assert decoded == pytest.approx((t_cover + 1) / t_count, abs=1e-9)


def test_mask_equals_swept_support_on_easy_scenes():
    for seed in range(8):
        spec = random_spec(seed, "easy")
        video, truth = render(spec)
        _, mask = stack_video(video)
        assert np.array_equal(mask, truth.supports[0])


def test_mask_ignores_frame_order_but_image_does_not():
    video, _ = render(random_spec(11, "easy"))
    img_fwd, mask_fwd = stack_video(video)
    img_rev, mask_rev = stack_video(video[::-1])
    assert np.array_equal(mask_fwd, mask_rev)
    assert not np.allclose(img_fwd, img_rev)


def test_stack_output_shapes_and_ranges():
    video, _ = render(random_spec(4, "hard"))
    img, mask = stack_video(video)
    assert img.shape == video.shape[1:]
    assert mask.shape == video.shape[1:3]
    assert mask.dtype == bool
    assert img.min() >= 0.0 and img.max() <= 1.0


# ------------------------------------------------------------ parameters


def test_params_reject_bad_tau():
    with pytest.raises(ValueError):
        StackParams(tau=-0.01)
    with pytest.raises(ValueError):
        StackParams(tau=1.01)


def test_params_reject_bad_theta_max():
    with pytest.raises(ValueError):
        StackParams(theta_max=0.0)
    with pytest.raises(ValueError):
        StackParams(theta_max=361.0)
    StackParams(theta_max=360.0)  # inclusive upper edge


# ------------------------------------------------------------- op count


@pytest.mark.parametrize("shape", [(1, 1, 1), (2, 3, 4), (3, 5, 2), (4, 4, 4)])
def test_flop_estimate_matches_instrumented_reference(shape):
    t, h, w = shape
    rng = np.random.default_rng(hash(shape) % 2**32)
    video = rng.uniform(size=(t, h, w, 3))
    params = StackParams()
    ref_img, ref_mask, ops = _instrumented_stack(video, params)
    img, mask = stack_video(video, params)
    assert flop_estimate(t, h, w) == ops
    assert np.array_equal(mask, ref_mask)
    assert np.allclose(img, ref_img, atol=1e-12)


def test_flop_estimate_smallest_case():
    assert flop_estimate(1, 1, 1) == 51


def test_flop_estimate_rejects_bad_dims():
    for t, h, w in [(0, 4, 4), (4, 0, 4), (4, 4, 0), (-1, 2, 2)]:
        with pytest.raises(ValueError):
            flop_estimate(t, h, w)
