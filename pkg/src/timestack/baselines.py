"""Learning-free transmission baselines.

dct_analog_transmit: per-patch orthonormal 2D DCT, keep the
lowest-frequency coefficients (zig-zag order, channels round-robin)
up to each patch's symbol budget, send as analog symbols, invert.
Patch budgets follow gate-gain rank, so masked patches never get less
than unmasked ones. The power-normalization scale rides along as side
info so the receiver can undo it.

digital_transmit: classic separated design - 8-bit quantize, Hamming
(7,4) FEC, BPSK over the same complex channel (hard decision on the
real rail). Decodes cleanly above the code's threshold and collapses
below it: the cliff effect the analog schemes avoid.
"""

import numpy as np
from scipy.fft import dctn, idctn

from .channel import ChannelConfig, transmit
from .codec import allocate_budgets, gate, motion_coverage

# systematic Hamming(7,4): data bits first, then three parity bits
HAMMING_G = np.array(
    [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)
HAMMING_H = np.array(
    [
        [1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ],
    dtype=np.uint8,
)

# syndrome integer -> error bit position (0 = no error)
_SYNDROME_TO_BIT = np.full(8, -1, dtype=int)
for _j in range(7):
    _SYNDROME_TO_BIT[int(HAMMING_H[0, _j] * 4 + HAMMING_H[1, _j] * 2 + HAMMING_H[2, _j])] = _j


def hamming_encode(bits):
    """(4m,) data bits -> (7m,) code bits."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 4:
        raise ValueError("bit count must be a multiple of 4")
    return ((bits.reshape(-1, 4) @ HAMMING_G) % 2).reshape(-1)


def hamming_decode(code_bits):
    """(7m,) code bits -> (4m,) data bits, correcting one error per block."""
    blocks = np.asarray(code_bits, dtype=np.uint8).reshape(-1, 7)
    syn = (blocks @ HAMMING_H.T) % 2
    syn_int = syn[:, 0] * 4 + syn[:, 1] * 2 + syn[:, 2]
    pos = _SYNDROME_TO_BIT[syn_int]
    bad = pos >= 0
    fixed = blocks.copy()
    fixed[bad, pos[bad]] ^= 1
    return fixed[:, :4].reshape(-1)


def _to_coeff_patches(img, p):
    """(H, W, 3) -> (N, 3, P, P) row-major patches, channel-first."""
    h, w, _ = img.shape
    blocks = img.reshape(h // p, p, w // p, p, 3).transpose(0, 2, 4, 1, 3)
    return blocks.reshape(-1, 3, p, p)


def _from_coeff_patches(patches, height, width, p):
    nh, nw = height // p, width // p
    blocks = patches.reshape(nh, nw, 3, p, p).transpose(0, 3, 1, 4, 2)
    return blocks.reshape(height, width, 3)


def selection_order(p):
    """Flat indices into (3, P, P) sorted by zig-zag frequency rank,
    the three channels interleaved within each rank."""
    order = sorted(
        ((r, c) for r in range(p) for c in range(p)),
        key=lambda rc: (rc[0] + rc[1], rc[1] if (rc[0] + rc[1]) % 2 else rc[0]),
    )
    flat = [ch * p * p + r * p + c for r, c in order for ch in range(3)]
    return np.asarray(flat, dtype=int)


def dct_analog_transmit(img, mask, k, cfg, patch_size=16, gate_w=2.0, gate_b=0.0, epsilon=0.1):
    """Analog DCT baseline over k complex symbols. Returns the image."""
    img = np.asarray(img, dtype=float)
    h, w, _ = img.shape
    coverage = motion_coverage(mask, patch_size)
    gains = gate(coverage, gate_w, gate_b, epsilon)
    budgets = allocate_budgets(k, gains)  # gate-gain rank sets the boost
    if 2 * budgets.max() > 3 * patch_size**2:
        raise ValueError("budget exceeds coefficients available per patch")

    patches = _to_coeff_patches(img, patch_size)
    coeffs = dctn(patches, axes=(2, 3), norm="ortho")
    order = selection_order(patch_size)
    flat = coeffs.reshape(len(patches), -1)[:, order]
    cols = np.arange(flat.shape[1])
    keep = cols[None, :] < 2 * budgets[:, None]
    reals = flat[keep]
    z = reals[0::2] + 1j * reals[1::2]

    power = np.mean(np.abs(z) ** 2)
    if power == 0.0:
        raise ValueError("cannot transmit an all-zero coefficient set")
    norm = np.sqrt(power)
    zhat = transmit(z / norm, cfg) * norm  # receiver knows the scale

    rx_reals = np.empty(2 * z.size)
    rx_reals[0::2] = zhat.real
    rx_reals[1::2] = zhat.imag
    rx_flat = np.zeros_like(flat)
    rx_flat[keep] = rx_reals
    rx_coeffs = np.zeros_like(flat)
    rx_coeffs[:, order] = rx_flat
    rec = idctn(rx_coeffs.reshape(patches.shape), axes=(2, 3), norm="ortho")
    return np.clip(_from_coeff_patches(rec, h, w, patch_size), 0.0, 1.0)


def digital_transmit(img, snr_db, seed):
    """8-bit quantize -> Hamming(7,4) -> BPSK -> AWGN -> hard decode."""
    img = np.asarray(img, dtype=float)
    quant = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    bits = np.unpackbits(quant.ravel())  # MSB first; length is 8n, 4 | 8n
    code = hamming_encode(bits)
    symbols = (1.0 - 2.0 * code.astype(float)).astype(complex)  # unit power
    received = transmit(symbols, ChannelConfig("awgn", snr_db, seed))
    rx_code = (received.real < 0.0).astype(np.uint8)
    rx_bits = hamming_decode(rx_code)
    values = np.packbits(rx_bits)
    return values.reshape(img.shape).astype(float) / 255.0
