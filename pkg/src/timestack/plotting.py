"""Tiny dependency-free line charts rendered straight to PNG.

Good enough for sweep curves: axes, ticks, gridlines, polylines with
markers, a legend, and a 3x5 pixel font. Not a plotting library.
"""

from dataclasses import dataclass

import numpy as np

from .imageio import write_png

# 3x5 microfont; rows of '1' pixels, uppercase only
_GLYPHS = {
    "0": ("111", "101", "101", "101", "111"),
    "1": ("010", "110", "010", "010", "111"),
    "2": ("111", "001", "111", "100", "111"),
    "3": ("111", "001", "111", "001", "111"),
    "4": ("101", "101", "111", "001", "001"),
    "5": ("111", "100", "111", "001", "111"),
    "6": ("111", "100", "111", "101", "111"),
    "7": ("111", "001", "001", "010", "010"),
    "8": ("111", "101", "111", "101", "111"),
    "9": ("111", "101", "111", "001", "111"),
    "A": ("010", "101", "111", "101", "101"),
    "B": ("110", "101", "110", "101", "110"),
    "C": ("011", "100", "100", "100", "011"),
    "D": ("110", "101", "101", "101", "110"),
    "E": ("111", "100", "110", "100", "111"),
    "F": ("111", "100", "110", "100", "100"),
    "G": ("011", "100", "101", "101", "011"),
    "H": ("101", "101", "111", "101", "101"),
    "I": ("111", "010", "010", "010", "111"),
    "J": ("001", "001", "001", "101", "010"),
    "K": ("101", "110", "100", "110", "101"),
    "L": ("100", "100", "100", "100", "111"),
    "M": ("101", "111", "111", "101", "101"),
    "N": ("101", "111", "111", "111", "101"),
    "O": ("010", "101", "101", "101", "010"),
    "P": ("110", "101", "110", "100", "100"),
    "Q": ("010", "101", "101", "110", "011"),
    "R": ("110", "101", "110", "110", "101"),
    "S": ("011", "100", "010", "001", "110"),
    "T": ("111", "010", "010", "010", "010"),
    "U": ("101", "101", "101", "101", "111"),
    "V": ("101", "101", "101", "101", "010"),
    "W": ("101", "101", "111", "111", "101"),
    "X": ("101", "101", "010", "101", "101"),
    "Y": ("101", "101", "010", "010", "010"),
    "Z": ("111", "001", "010", "100", "111"),
    "-": ("000", "000", "111", "000", "000"),
    ".": ("000", "000", "000", "000", "010"),
    ",": ("000", "000", "000", "010", "100"),
    ":": ("000", "010", "000", "010", "000"),
    "/": ("001", "001", "010", "100", "100"),
    "(": ("01", "10", "10", "10", "01"),
    ")": ("10", "01", "01", "01", "10"),
    "+": ("000", "010", "111", "010", "000"),
    "=": ("000", "111", "000", "111", "000"),
    "%": ("101", "001", "010", "100", "101"),
    " ": ("000", "000", "000", "000", "000"),
}

PALETTE = (
    (0.12, 0.35, 0.80),
    (0.85, 0.33, 0.10),
    (0.13, 0.55, 0.13),
    (0.58, 0.15, 0.65),
    (0.75, 0.60, 0.05),
    (0.10, 0.62, 0.62),
)


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: tuple = None  # filled from PALETTE if unset


def draw_text(canvas, row, col, text, color=(0.1, 0.1, 0.1), scale=1):
    """Paint text with the microfont; returns the column after the text."""
    h, w, _ = canvas.shape
    for ch in str(text).upper():
        glyph = _GLYPHS.get(ch, _GLYPHS[" "])
        gw = len(glyph[0])
        for gr, bits in enumerate(glyph):
            for gc, bit in enumerate(bits):
                if bit != "1":
                    continue
                r0, c0 = row + gr * scale, col + gc * scale
                r1, c1 = min(r0 + scale, h), min(c0 + scale, w)
                if r0 < h and c0 < w and r0 >= 0 and c0 >= 0:
                    canvas[r0:r1, c0:c1] = color
        col += (gw + 1) * scale
    return col


def _text_width(text, scale=1):
    return sum((len(_GLYPHS.get(ch, _GLYPHS[" "])[0]) + 1) * scale for ch in str(text).upper())


def _plot_segment(canvas, r0, c0, r1, c1, color):
    steps = int(max(abs(r1 - r0), abs(c1 - c0)) * 2) + 1
    rows = np.round(np.linspace(r0, r1, steps)).astype(int)
    cols = np.round(np.linspace(c0, c1, steps)).astype(int)
    h, w, _ = canvas.shape
    for dr in (0, 1):
        for dc in (0, 1):
            ok = (rows + dr >= 0) & (rows + dr < h) & (cols + dc >= 0) & (cols + dc < w)
            canvas[rows[ok] + dr, cols[ok] + dc] = color


def _marker(canvas, r, c, color):
    h, w, _ = canvas.shape
    canvas[max(r - 1, 0) : min(r + 2, h), max(c - 1, 0) : min(c + 2, w)] = color


def _ticks(lo, hi, n=5):
    if not np.isfinite([lo, hi]).all() or lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min((s for s in (1.0, 2.0, 2.5, 5.0, 10.0)), key=lambda s: abs(s * mag - raw)) * mag
    first = np.ceil(lo / step) * step
    ticks = np.arange(first, hi + step * 1e-9, step)
    return [float(t) for t in ticks]


def _fmt(v):
    if v == int(v) and abs(v) < 1e6:
        return str(int(v))
    return f"{v:g}"


def line_chart(series, title="", xlabel="", ylabel="", size=(480, 640), path=None):
    """Render series to an (H, W, 3) float canvas; optionally write a PNG."""
    height, width = size
    canvas = np.ones((height, width, 3))
    top, left, bottom, right = 28, 58, 36, 14
    ph, pw = height - top - bottom, width - left - right

    pts = [
        (np.asarray(s.x, dtype=float), np.asarray(s.y, dtype=float)) for s in series
    ]
    finite_x = np.concatenate([x[np.isfinite(x) & np.isfinite(y)] for x, y in pts] or [np.array([0.0])])
    finite_y = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for x, y in pts] or [np.array([0.0])])
    if finite_x.size == 0:
        finite_x = np.array([0.0, 1.0])
    if finite_y.size == 0:
        finite_y = np.array([0.0, 1.0])
    x_lo, x_hi = float(finite_x.min()), float(finite_x.max())
    y_lo, y_hi = float(finite_y.min()), float(finite_y.max())
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_pad, y_pad = 0.04 * (x_hi - x_lo), 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def to_col(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (pw - 1)

    def to_row(y):
        return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * (ph - 1)

    grid = (0.88, 0.88, 0.88)
    axis = (0.25, 0.25, 0.25)
    for t in _ticks(x_lo, x_hi):
        c = int(round(to_col(t)))
        if left <= c < left + pw:
            canvas[top : top + ph, c] = grid
            label = _fmt(t)
            draw_text(canvas, top + ph + 4, c - _text_width(label) // 2, label, axis)
    for t in _ticks(y_lo, y_hi):
        r = int(round(to_row(t)))
        if top <= r < top + ph:
            canvas[r, left : left + pw] = grid
            label = _fmt(t)
            draw_text(canvas, r - 2, left - 4 - _text_width(label), label, axis)
    canvas[top : top + ph, left] = axis
    canvas[top + ph - 1, left : left + pw] = axis

    for i, ((x, y), s) in enumerate(zip(pts, series)):
        color = s.color if s.color is not None else PALETTE[i % len(PALETTE)]
        last = None
        for xv, yv in zip(x, y):
            if not (np.isfinite(xv) and np.isfinite(yv)):
                last = None
                continue
            r, c = to_row(yv), to_col(xv)
            if last is not None:
                _plot_segment(canvas, last[0], last[1], r, c, color)
            _marker(canvas, int(round(r)), int(round(c)), color)
            last = (r, c)

    if title:
        draw_text(canvas, 8, (width - _text_width(title, 2)) // 2, title, axis, scale=2)
    if xlabel:
        draw_text(canvas, height - 12, left + (pw - _text_width(xlabel)) // 2, xlabel, axis)
    if ylabel:
        draw_text(canvas, top - 10, 4, ylabel, axis)

    legend_r = top + 4
    legend_c = left + pw - 4 - max((_text_width(s.label) for s in series), default=0) - 14
    for i, s in enumerate(series):
        color = s.color if s.color is not None else PALETTE[i % len(PALETTE)]
        canvas[legend_r + 1 : legend_r + 4, legend_c : legend_c + 10] = color
        draw_text(canvas, legend_r, legend_c + 14, s.label, axis)
        legend_r += 9

    if path is not None:
        write_png(path, canvas)
    return canvas
