"""Digital and DCT baselines: code algebra, quantization, budgets."""

import numpy as np
import pytest
from scipy.fft import dctn

from timestack.baselines import (
    HAMMING_G,
    HAMMING_H,
    digital_transmit,
    dct_analog_transmit,
    hamming_decode,
    hamming_encode,
    selection_order,
)
from timestack.channel import ChannelConfig
from timestack.metrics import psnr

INF = float("inf")


# -------------------------------------------------------------- hamming


def test_generator_and_check_matrices_are_consistent():
    assert ((HAMMING_G @ HAMMING_H.T) % 2 == 0).all()


def test_hamming_roundtrip_all_datawords():
    for value in range(16):
        data = np.array([(value >> i) & 1 for i in range(4)], dtype=np.uint8)
        code = hamming_encode(data)
        assert code.shape == (7,)
        assert np.array_equal(code[:4], data)  # systematic
        assert np.array_equal(hamming_decode(code), data)


def test_hamming_corrects_every_single_bit_error():
    for value in range(16):
        data = np.array([(value >> i) & 1 for i in range(4)], dtype=np.uint8)
        code = hamming_encode(data)
        for pos in range(7):
            corrupted = code.copy()
            corrupted[pos] ^= 1
            assert np.array_equal(hamming_decode(corrupted), data), (value, pos)


def test_hamming_handles_batches():
    rng = np.random.default_rng(0)
    data = (rng.random(4 * 100) < 0.5).astype(np.uint8)
    code = hamming_encode(data)
    assert code.shape == (7 * 100,)
    assert np.array_equal(hamming_decode(code), data)


def test_hamming_encode_rejects_ragged_input():
    with pytest.raises(ValueError):
        hamming_encode(np.zeros(6, dtype=np.uint8))


# -------------------------------------------------------------- digital


def test_noiseless_digital_is_exact_8bit_quantization():
    rng = np.random.default_rng(5)
    img = rng.uniform(size=(16, 16, 3))
    rec = digital_transmit(img, INF, seed=0)
    assert np.array_equal(rec, np.round(img * 255.0) / 255.0)


def test_digital_collapses_at_low_snr():
    rng = np.random.default_rng(6)
    img = rng.uniform(size=(16, 16, 3))
    clean = digital_transmit(img, INF, seed=1)
    noisy = digital_transmit(img, -10.0, seed=1)
    assert psnr(img, noisy) < psnr(img, clean) - 20.0


def test_digital_is_deterministic_in_seed():
    rng = np.random.default_rng(7)
    img = rng.uniform(size=(8, 8, 3))
    a = digital_transmit(img, 0.0, seed=42)
    b = digital_transmit(img, 0.0, seed=42)
    c = digital_transmit(img, 0.0, seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ------------------------------------------------------------------ dct


def test_selection_order_is_a_permutation():
    order = selection_order(4)
    assert sorted(order.tolist()) == list(range(3 * 16))


def test_selection_order_prefers_low_frequencies():
    order = selection_order(2)
    # DC of all three channels first; flat index = ch*4 + r*2 + c
    assert order[:3].tolist() == [0, 4, 8]
    # then the two first-order coefficients, channels interleaved
    first_order = {1, 2}  # (0,1) -> 1 and (1,0) -> 2 within a channel
    assert {i % 4 for i in order[3:9]} <= first_order


def test_dct_noiseless_with_full_budget_is_near_lossless():
    rng = np.random.default_rng(8)
    img = rng.uniform(size=(8, 8, 3))
    mask = np.zeros((8, 8), dtype=bool)
    k = 8 * 8 * 3 // 2  # every coefficient rides a symbol slot
    cfg = ChannelConfig("awgn", INF, 0)
    rec = dct_analog_transmit(img, mask, k, cfg, patch_size=8)
    assert psnr(img, rec) > 80.0


def test_dct_noiseless_truncation_keeps_smooth_content():
    # low-pass behavior: a smooth ramp survives a small budget
    r = np.linspace(0.2, 0.8, 16)
    img = np.repeat(np.tile(r, (16, 1))[:, :, None], 3, axis=2)
    mask = np.zeros((16, 16), dtype=bool)
    cfg = ChannelConfig("awgn", INF, 0)
    rec = dct_analog_transmit(img, mask, 24, cfg, patch_size=16)
    assert psnr(img, rec) > 30.0


def test_dct_budget_overflow_raises():
    img = np.full((8, 8, 3), 0.5)
    mask = np.ones((8, 8), dtype=bool)
    cfg = ChannelConfig("awgn", INF, 0)
    with pytest.raises(ValueError):
        dct_analog_transmit(img, mask, 8 * 8 * 3, cfg, patch_size=8)


def test_dct_rejects_black_image():
    img = np.zeros((16, 16, 3))
    mask = np.zeros((16, 16), dtype=bool)
    with pytest.raises(ValueError):
        dct_analog_transmit(img, mask, 16, ChannelConfig("awgn", INF, 0))


def test_dct_masked_patches_get_the_remainder_symbols():
    rng = np.random.default_rng(9)
    img = rng.uniform(size=(32, 32, 3))
    mask = np.zeros((32, 32), dtype=bool)
    mask[16:, 16:] = True  # only patch 3 is moving
    cfg = ChannelConfig("awgn", INF, 0)
    # k=4*b+2: two spare symbols must land on... exactly one hot patch,
    # then the tie among cold patches resolves to the lowest index
    rec_focus = dct_analog_transmit(img, mask, 4 * 30 + 2, cfg, patch_size=16)
    # masked-quadrant error must not exceed the unmasked average
    err = ((img - rec_focus) ** 2).mean(axis=2)
    hot = err[16:, 16:].mean()
    cold = (err[:16, 16:].mean() + err[16:, :16].mean()) / 2
    assert hot <= cold + 1e-9
