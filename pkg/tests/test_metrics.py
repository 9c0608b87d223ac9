"""Distortion and bandwidth accounting."""

import numpy as np
import pytest

from timestack.metrics import bandwidth_report, bcr, masked_mse_split, mse, psnr


def test_bcr_identity_when_k_equals_source():
    assert bcr(8 * 16 * 16 * 3, 8, 16, 16) == 1.0


def test_bcr_published_operating_points():
    # 252 and 2045 symbols on an 8-frame 256x256 video
    assert bcr(252, 8, 256, 256) == pytest.approx(1.602e-4, abs=5e-8)
    assert bcr(2045, 8, 256, 256) == pytest.approx(1.300e-3, abs=5e-7)


def test_bcr_monotonicity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        k = int(rng.integers(1, 1000))
        t, h, w = (int(rng.integers(1, 20)) for _ in range(3))
        assert bcr(k + 1, t, h, w) > bcr(k, t, h, w)
        assert bcr(k, t + 1, h, w) < bcr(k, t, h, w)
        assert bcr(k, t, h + 1, w) < bcr(k, t, h, w)


def test_bcr_rejects_nonpositive():
    with pytest.raises(ValueError):
        bcr(0, 8, 64, 64)
    with pytest.raises(ValueError):
        bcr(10, 0, 64, 64)


def test_bandwidth_report_fields():
    rep = bandwidth_report(128, 8, 64, 64)
    assert rep.k == 128
    assert rep.source_elements == 8 * 64 * 64 * 3
    assert rep.bcr == 128 / (8 * 64 * 64 * 3)
    assert rep.reduction_vs_raw == pytest.approx(1.0 / rep.bcr)


def test_psnr_identical_hits_cap():
    img = np.full((4, 4, 3), 0.25)
    assert psnr(img, img) == 99.0


def test_psnr_unit_error_is_zero_db():
    ref = np.zeros((4, 4, 3))
    assert psnr(ref, np.ones_like(ref)) == pytest.approx(0.0, abs=1e-12)


def test_psnr_log_arithmetic():
    ref = np.zeros((10, 10, 3))
    rec = np.full_like(ref, 0.1)  # MSE 0.01
    assert psnr(ref, rec) == pytest.approx(20.0, abs=1e-9)


def test_psnr_near_identical_still_capped():
    ref = np.zeros((4, 4, 3))
    assert psnr(ref, ref + 1e-10) == 99.0


def test_mse_shape_mismatch():
    with pytest.raises(ValueError):
        mse(np.zeros((2, 2, 3)), np.zeros((3, 2, 3)))


def test_masked_split_exact_reconstruction():
    rng = np.random.default_rng(1)
    img = rng.uniform(0, 1, (6, 6, 3))
    mask = rng.random((6, 6)) > 0.5
    assert masked_mse_split(img, img, mask) == (0.0, 0.0)


def test_masked_split_empty_regions_are_absent():
    img = np.zeros((4, 4, 3))
    rec = np.ones_like(img)
    full = np.ones((4, 4), dtype=bool)
    in_mse, out_mse = masked_mse_split(img, rec, full)
    assert in_mse == 1.0 and out_mse is None
    in_mse, out_mse = masked_mse_split(img, rec, ~full)
    assert in_mse is None and out_mse == 1.0


def test_masked_split_matches_scalar_oracle():
    rng = np.random.default_rng(2)
    ref = rng.uniform(0, 1, (5, 7, 3))
    rec = rng.uniform(0, 1, (5, 7, 3))
    mask = rng.random((5, 7)) > 0.4
    got_in, got_out = masked_mse_split(ref, rec, mask)

    acc = {True: [], False: []}
    for r in range(5):
        for c in range(7):
            for ch in range(3):
                acc[bool(mask[r, c])].append((ref[r, c, ch] - rec[r, c, ch]) ** 2)
    assert got_in == pytest.approx(np.mean(acc[True]), abs=1e-9)
    assert got_out == pytest.approx(np.mean(acc[False]), abs=1e-9)


def test_masked_split_recombines_to_plain_mse():
    rng = np.random.default_rng(3)
    for _ in range(10):
        ref = rng.uniform(0, 1, (6, 4, 3))
        rec = rng.uniform(0, 1, (6, 4, 3))
        mask = rng.random((6, 4)) > rng.random()
        m_in, m_out = masked_mse_split(ref, rec, mask)
        n_in, n_out = 3 * mask.sum(), 3 * (~mask).sum()
        total = 0.0
        if m_in is not None:
            total += m_in * n_in
        if m_out is not None:
            total += m_out * n_out
        assert total / (n_in + n_out) == pytest.approx(mse(ref, rec), abs=1e-9)
