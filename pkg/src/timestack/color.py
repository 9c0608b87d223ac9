"""RGB <-> YIQ conversion and hue rotation about the luminance axis.

All functions operate on float arrays whose last axis holds the three
color components. Values are treated as linear intensities in [0, 1];
nothing here applies gamma.
"""

import numpy as np

# NTSC-style forward matrix. Rows: Y, I, Q. The I and Q rows sum to zero,
# so achromatic pixels (r = g = b) have zero chroma.
RGB_TO_YIQ = np.array(
    [
        [0.2990, 0.5870, 0.1140],
        [0.5959, -0.2746, -0.3213],
        [0.2115, -0.5227, 0.3112],
    ]
)

YIQ_TO_RGB = np.linalg.inv(RGB_TO_YIQ)

# inverse must reproduce identity to near machine precision
_residual = np.abs(RGB_TO_YIQ @ YIQ_TO_RGB - np.eye(3)).max()
assert _residual < 1e-12, f"YIQ inverse residual {_residual:.3e}"

# Largest per-channel RGB response to a unit chroma vector at the worst
# hue angle: max_ch hypot(M[ch,1], M[ch,2]) for M = YIQ_TO_RGB. Chroma of
# magnitude c moves every channel by at most CHROMA_SPAN * c.
CHROMA_SPAN = float(np.hypot(YIQ_TO_RGB[:, 1], YIQ_TO_RGB[:, 2]).max())


def rgb_to_yiq(rgb):
    """Map (..., 3) RGB to YIQ. Pure linear transform, no clipping."""
    return np.asarray(rgb, dtype=float) @ RGB_TO_YIQ.T


def yiq_to_rgb(yiq):
    """Map (..., 3) YIQ back to RGB. No clipping; caller decides."""
    return np.asarray(yiq, dtype=float) @ YIQ_TO_RGB.T


def hue_rotate(frame, theta_deg, clip=True):
    """Rotate the chroma (I, Q) of every pixel by theta_deg about Y.

    Luminance is untouched before the final clip. With clip=False the
    raw RGB is returned, which keeps rotation additivity exact.
    """
    yiq = rgb_to_yiq(frame)
    th = np.deg2rad(theta_deg)
    c, s = np.cos(th), np.sin(th)
    rot = yiq.copy()
    rot[..., 1] = c * yiq[..., 1] - s * yiq[..., 2]
    rot[..., 2] = s * yiq[..., 1] + c * yiq[..., 2]
    rgb = yiq_to_rgb(rot)
    if clip:
        rgb = np.clip(rgb, 0.0, 1.0)
    return rgb


def chroma_magnitude(rgb):
    """Per-pixel chroma magnitude hypot(I, Q) of (..., 3) RGB data."""
    yiq = rgb_to_yiq(rgb)
    return np.hypot(yiq[..., 1], yiq[..., 2])
