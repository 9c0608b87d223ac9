"""Distortion and bandwidth accounting."""

import math
from dataclasses import dataclass

import numpy as np

PSNR_CAP_DB = 99.0  # reported for exact (or numerically exact) matches


@dataclass(frozen=True)
class BandwidthReport:
    k: int  # complex channel symbols per video
    source_elements: int  # T*H*W*3 real samples
    bcr: float  # k / source_elements
    reduction_vs_raw: float  # 1 / bcr


def bcr(k, t, h, w):
    """Bandwidth compression ratio: k symbols over T*H*W*3 source reals."""
    if k <= 0 or t <= 0 or h <= 0 or w <= 0:
        raise ValueError("all inputs must be positive")
    return k / (t * h * w * 3)


def bandwidth_report(k, t, h, w):
    ratio = bcr(k, t, h, w)
    return BandwidthReport(k, t * h * w * 3, ratio, 1.0 / ratio)


def mse(ref, rec):
    ref = np.asarray(ref, dtype=float)
    rec = np.asarray(rec, dtype=float)
    if ref.shape != rec.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {rec.shape}")
    return float(np.mean((ref - rec) ** 2))


def psnr(ref, rec):
    """10*log10(1/MSE) for [0,1] images, capped at 99 dB."""
    err = mse(ref, rec)
    if err == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(1.0 / err))


def masked_mse_split(ref, rec, mask):
    """(mse inside mask, mse outside mask); an empty region gives None."""
    ref = np.asarray(ref, dtype=float)
    rec = np.asarray(rec, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if ref.shape != rec.shape or mask.shape != ref.shape[:2]:
        raise ValueError("ref/rec/mask dimensions do not line up")
    sq = (ref - rec) ** 2
    inside = sq[mask]
    outside = sq[~mask]
    mse_in = float(inside.mean()) if inside.size else None
    mse_out = float(outside.mean()) if outside.size else None
    return mse_in, mse_out
