"""PNG and raw-float file I/O.

Pixels live as float64 in [0, 1] inside the pipeline; PNG quantizes to
8-bit RGB only at this boundary. The raw dump keeps full precision for
intermediate inspection: one JSON header line {"H","W","C","T"} followed
by little-endian float32 payload in planar (T, C, H, W) order.
"""

import json

import numpy as np
from PIL import Image


def write_png(path, img):
    """Write a (H, W, 3) float image in [0,1] or a (H, W) bool mask."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        data = (arr.astype(bool) * np.uint8(255))
        Image.fromarray(data, mode="L").save(path)
        return
    data = np.clip(np.round(arr * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(path)


def read_png(path):
    """Read a PNG into float64: RGB -> (H, W, 3) in [0,1], L -> (H, W) bool."""
    img = Image.open(path)
    if img.mode in ("L", "1"):
        return np.asarray(img, dtype=np.uint8) > 127
    arr = np.asarray(img.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def write_float_dump(path, data):
    """Dump a frame (H,W,3) or video (T,H,W,3) losslessly-ish as float32."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[-1] != 3:
        raise ValueError(f"expected (H,W,3) or (T,H,W,3), got {arr.shape}")
    t, h, w, c = arr.shape
    header = {"H": h, "W": w, "C": c, "T": t}
    planar = np.ascontiguousarray(arr.transpose(0, 3, 1, 2), dtype="<f4")
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("ascii"))
        fh.write(planar.tobytes())


def read_float_dump(path):
    """Inverse of write_float_dump. Returns (T, H, W, C) float64."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        payload = np.frombuffer(fh.read(), dtype="<f4")
    t, h, w, c = header["T"], header["H"], header["W"], header["C"]
    if payload.size != t * c * h * w:
        raise ValueError("float dump payload does not match its header")
    planar = payload.reshape(t, c, h, w).astype(np.float64)
    return planar.transpose(0, 2, 3, 1)
