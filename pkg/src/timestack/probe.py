"""Task probe: answer motion queries straight from a stacked image.

The probe inverts the hue->time mapping of the stacking step. Each
masked pixel's chroma angle, divided by theta_max, estimates the time
fraction t-hat at which that pixel last saw the moving foreground.
Connected mask components are treated as one trail per object, and the
three supported queries are answered from order statistics of t-hat.

Queries: direction-8way (compass heading of the dominant trail),
which-moved-last (trail with the larger 95th-percentile t-hat), and
moving-at-end (trails whose max t-hat exceeds 0.8).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .color import rgb_to_yiq

CHROMA_FLOOR = 0.02  # rejects channel-noise speckle
MOVING_AT_END_THRESHOLD = 0.8
EIGHT_CONN = np.ones((3, 3), dtype=int)

# counter-clockwise from east; sector boundaries at odd multiples of 22.5 deg
COMPASS_LABELS = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")


def compass_sector(dy_up, dx):
    """8-way compass label of a vector given in (up, right) components."""
    ang = math.degrees(math.atan2(dy_up, dx)) % 360.0
    return COMPASS_LABELS[int(round(ang / 45.0)) % 8]


def _reduce_angle(ang_deg, theta_max):
    """Map raw angles into the window centered on the valid hue range.

    Valid hues span [0, theta_max]; the unused (360 - theta_max) arc is
    split evenly as guard bands below 0 and above theta_max, so noise
    that nudges an early hue slightly negative clamps to 0 instead of
    wrapping around to look like the latest time.
    """
    lo = (theta_max - 360.0) / 2.0
    return (ang_deg - lo) % 360.0 + lo


def hue_to_time(pixel, theta_max=270.0, floor=CHROMA_FLOOR):
    """Decode one rgb pixel to a time fraction in [0,1], or None.

    None means undecodable: chroma magnitude below the floor. Assumes
    the pre-rotation residual carried zero initial hue, which the
    stacking step's chroma seeding guarantees.
    """
    y, i, q = rgb_to_yiq(np.asarray(pixel, dtype=float))
    chroma = math.hypot(i, q)
    if chroma < floor:
        return None
    ang = _reduce_angle(math.degrees(math.atan2(q, i)), theta_max)
    return min(1.0, max(0.0, ang / theta_max))


def decode_field(img, theta_max=270.0, floor=CHROMA_FLOOR):
    """Vectorized hue_to_time: returns (t_hat, chroma) maps, NaN where
    the chroma floor rejects the pixel."""
    yiq = rgb_to_yiq(img)
    chroma = np.hypot(yiq[..., 1], yiq[..., 2])
    ang = _reduce_angle(np.degrees(np.arctan2(yiq[..., 2], yiq[..., 1])), theta_max)
    t_hat = np.clip(ang / theta_max, 0.0, 1.0)
    t_hat[chroma < floor] = np.nan
    return t_hat, chroma


@dataclass
class Trail:
    """One connected mask component with per-pixel time decodes."""

    pixels: np.ndarray  # (n, 2) int (row, col), every component pixel
    t_hat: np.ndarray  # (n,) float, NaN where undecodable
    confidence: np.ndarray  # (n,) chroma magnitude

    @property
    def decodable(self):
        return np.isfinite(self.t_hat)

    @property
    def times(self):
        return self.t_hat[self.decodable]


@dataclass
class ProbeAnswer:
    query: str
    label: object  # compass label, trail index, index list, or "unknown"
    confidence: float


def extract_trails(img, mask, theta_max=270.0, floor=CHROMA_FLOOR):
    """Split the mask into 8-connected components and decode each."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return []
    t_hat, chroma = decode_field(np.asarray(img, dtype=float), theta_max, floor)
    labels, count = ndimage.label(mask, structure=EIGHT_CONN)
    trails = []
    for idx in range(1, count + 1):
        rows, cols = np.nonzero(labels == idx)
        pix = np.stack([rows, cols], axis=1)
        trails.append(Trail(pix, t_hat[rows, cols], chroma[rows, cols]))
    return trails


def _unknown(query):
    return ProbeAnswer(query, "unknown", 0.0)


def _direction(trails):
    # dominant trail = most decodable pixels
    best = max(trails, key=lambda tr: int(tr.decodable.sum()), default=None)
    if best is None or best.decodable.sum() < 4:
        return _unknown("direction-8way")
    times = best.t_hat[best.decodable]
    pos = best.pixels[best.decodable].astype(float)
    lo_q, hi_q = np.percentile(times, [25.0, 75.0])
    early = pos[times <= lo_q].mean(axis=0)
    late = pos[times >= hi_q].mean(axis=0)
    d_row, d_col = late - early
    if d_row == 0.0 and d_col == 0.0:
        return _unknown("direction-8way")
    label = compass_sector(-d_row, d_col)
    return ProbeAnswer("direction-8way", label, float(np.hypot(d_row, d_col)))


def _which_moved_last(trails):
    scored = [
        (i, float(np.percentile(tr.times, 95.0)))
        for i, tr in enumerate(trails)
        if tr.decodable.any()
    ]
    if len(scored) < 2:
        return _unknown("which-moved-last")
    scored.sort(key=lambda x: x[1])
    winner, top = scored[-1]
    margin = top - scored[-2][1]
    return ProbeAnswer("which-moved-last", winner, margin)


def _moving_at_end(trails):
    chosen = [
        i
        for i, tr in enumerate(trails)
        if tr.decodable.any() and float(tr.times.max()) > MOVING_AT_END_THRESHOLD
    ]
    conf = 1.0 if any(tr.decodable.any() for tr in trails) else 0.0
    return ProbeAnswer("moving-at-end", chosen, conf)


def answer(query, trails):
    """Answer one query from extracted trails; "unknown" counts as wrong."""
    if not trails:
        return _unknown(query)
    if query == "direction-8way":
        return _direction(trails)
    if query == "which-moved-last":
        return _which_moved_last(trails)
    if query == "moving-at-end":
        return _moving_at_end(trails)
    raise ValueError(f"unknown query kind {query!r}")


def format_label(label):
    """Flatten an answer label to a stable string for CSV/JSON output."""
    if label is None:
        return "unknown"
    if isinstance(label, (list, tuple)):
        return "+".join(str(v) for v in label) if label else "none"
    return str(label)


# ---------------------------------------------------------------- scoring


def match_trail(trail, truth, min_overlap=0.3):
    """Index of the truth object whose sweep support best explains the
    trail, or None if nothing overlaps enough."""
    if len(trail.pixels) == 0:
        return None
    rows, cols = trail.pixels[:, 0], trail.pixels[:, 1]
    best, best_frac = None, 0.0
    for i, support in enumerate(truth.supports):
        frac = float(support[rows, cols].mean())
        if frac > best_frac:
            best, best_frac = i, frac
    return best if best_frac >= min_overlap else None


def score_answer(ans, trails, truth):
    """True iff the probe's answer agrees with scene ground truth."""
    if ans.label == "unknown":
        return False
    if ans.query == "direction-8way":
        best = max(trails, key=lambda tr: int(tr.decodable.sum()))
        obj = match_trail(best, truth)
        return obj is not None and truth.direction[obj] == ans.label
    if ans.query == "which-moved-last":
        obj = match_trail(trails[ans.label], truth)
        return obj is not None and obj == truth.last_mover
    if ans.query == "moving-at-end":
        chosen = {match_trail(trails[i], truth) for i in ans.label}
        expected = {i for i, m in enumerate(truth.moving_at_end) if m}
        return None not in chosen and chosen == expected
    raise ValueError(f"unknown query kind {ans.query!r}")
