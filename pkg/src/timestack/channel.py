"""Complex baseband channel: power normalization, AWGN, block Rayleigh.

SNR is defined against unit mean symbol power, so callers must send
power-normalized vectors. Noise power sigma^2 = 10^(-snr_db/10) is the
total complex variance (sigma^2/2 per real dimension). snr_db=inf is
the noiseless sentinel. Everything is deterministic in the seed
(numpy PCG64 via default_rng; the seed fully determines the draws).
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    kind: str = "awgn"  # "awgn" | "rayleigh"
    snr_db: float = 10.0  # float("inf") = noiseless
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("awgn", "rayleigh"):
            raise ValueError(f"kind must be awgn|rayleigh, got {self.kind!r}")


def snr_to_noise_power(snr_db):
    """Total complex noise variance for the given SNR in dB."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def power_normalize(z):
    """Scale z so (1/k) sum |z_i|^2 == 1 exactly."""
    z = np.asarray(z, dtype=complex)
    power = np.mean(np.abs(z) ** 2)
    if power == 0.0:
        raise ValueError("cannot power-normalize a zero vector")
    return z / np.sqrt(power)


def transmit(z, cfg):
    """Send a power-normalized symbol vector through the channel.

    awgn: out = z + n. rayleigh: one block gain h ~ CN(0,1) is drawn
    first, then out = (h*z + n)/h (perfect CSI, zero-forcing). Returns
    a new array; the input is never modified.
    """
    z = np.asarray(z, dtype=complex)
    power = np.mean(np.abs(z) ** 2)
    if abs(power - 1.0) > 1e-6:
        raise ValueError(f"transmit expects unit mean power, got {power:.6g}")
    sigma2 = snr_to_noise_power(cfg.snr_db)
    rng = np.random.default_rng(cfg.seed)

    if cfg.kind == "awgn":
        if sigma2 == 0.0:
            return z.copy()
        re, im = rng.standard_normal((2, z.size))
        return z + np.sqrt(sigma2 / 2.0) * (re + 1j * im).reshape(z.shape)

    # rayleigh: h drawn before the noise, one gain per whole vector
    hr, hi = rng.standard_normal(2)
    h = (hr + 1j * hi) / np.sqrt(2.0)
    if sigma2 == 0.0:
        return (h * z) / h
    re, im = rng.standard_normal((2, z.size))
    noise = np.sqrt(sigma2 / 2.0) * (re + 1j * im).reshape(z.shape)
    return (h * z + noise) / h


def derive_seed(master, *parts):
    """Stable sub-seed from a master seed plus context labels.

    Hash-based so parallel trials, schemes and scenes get independent
    streams; sha256 keeps it identical across platforms and runs.
    """
    payload = ":".join([repr(int(master))] + [repr(p) for p in parts])
    digest = hashlib.sha256(payload.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little") & (2**63 - 1)
