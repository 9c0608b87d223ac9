"""Motion-gated patch-linear analog codec, trained by plain SGD.

The encoder splits the image into P x P patches, maps each patch's
3P^2 reals through one shared linear layer to complex symbols, scales
every patch's symbols by a motion gate sigmoid(w*coverage + b) + eps,
concatenates and power-normalizes. The decoder is one shared affine
map back to pixel space. Both are trained end to end through the noisy
channel on a motion-weighted squared error, with hand-derived
gradients (linear maps, the sigmoid, and the quotient rule through the
power normalization).

Symbol budget: every patch gets floor(k/N) complex symbols; the
k mod N remainder goes to the highest-coverage patches (ties broken by
row-major patch index). The shared encoder emits k_max symbols per
patch and patches simply keep their first budget-many.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .channel import power_normalize, snr_to_noise_power, transmit

PARAMS_DTYPE = "<f8"


def patchify(img, patch_size):
    """(H, W, 3) -> (N, 3*P*P), patches in row-major order."""
    img = np.asarray(img, dtype=float)
    h, w, _ = img.shape
    p = patch_size
    if h % p or w % p:
        raise ValueError(f"patch size {p} does not divide {h}x{w}")
    blocks = img.reshape(h // p, p, w // p, p, 3).transpose(0, 2, 1, 3, 4)
    return blocks.reshape((h // p) * (w // p), p * p * 3)


def unpatchify(patches, height, width, patch_size):
    """Inverse of patchify."""
    p = patch_size
    blocks = patches.reshape(height // p, width // p, p, p, 3)
    return blocks.transpose(0, 2, 1, 3, 4).reshape(height, width, 3)


def motion_coverage(mask, patch_size):
    """Per-patch mean of the mask, row-major patch order: (N,) in [0,1]."""
    mask = np.asarray(mask, dtype=float)
    h, w = mask.shape
    p = patch_size
    if h % p or w % p:
        raise ValueError(f"patch size {p} does not divide {h}x{w}")
    return mask.reshape(h // p, p, w // p, p).mean(axis=(1, 3)).reshape(-1)


def gate(coverage, w, b, epsilon):
    """Per-patch symbol gain: sigmoid(w*coverage + b) + epsilon."""
    return expit(w * np.asarray(coverage, dtype=float) + b) + epsilon


def allocate_budgets(k, coverage):
    """Per-patch complex-symbol counts summing to k.

    floor(k/N) each; the remainder goes one-by-one to the patches with
    the highest coverage, ties resolved by row-major index.
    """
    n = len(coverage)
    if k < n:
        raise ValueError(f"k={k} must be >= number of patches {n}")
    budgets = np.full(n, k // n, dtype=int)
    remainder = k % n
    if remainder:
        order = np.argsort(-np.asarray(coverage, dtype=float), kind="stable")
        budgets[order[:remainder]] += 1
    return budgets


@dataclass
class CodecParams:
    """Learnable codec state tied to one image geometry."""

    height: int
    width: int
    patch_size: int
    k: int  # complex symbols per image
    enc: np.ndarray  # (2*k_max, 3P^2)
    dec: np.ndarray  # (3P^2, 2*k_max)
    dec_bias: np.ndarray  # (3P^2,)
    gate_w: float = 2.0
    gate_b: float = 0.0
    epsilon: float = 0.1  # gate floor: static patches keep some power
    alpha: float = 0.5  # motion weight in the training loss

    def __post_init__(self):
        if self.height % self.patch_size or self.width % self.patch_size:
            raise ValueError("patch size must divide both image dimensions")
        if self.k < self.num_patches:
            raise ValueError("need at least one symbol per patch")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.enc.shape != (2 * self.k_max, self.patch_dim):
            raise ValueError(f"encoder shape {self.enc.shape} is wrong")
        if self.dec.shape != (self.patch_dim, 2 * self.k_max):
            raise ValueError(f"decoder shape {self.dec.shape} is wrong")

    @property
    def num_patches(self):
        return (self.height // self.patch_size) * (self.width // self.patch_size)

    @property
    def patch_dim(self):
        return 3 * self.patch_size**2

    @property
    def k_max(self):
        base, rem = divmod(self.k, self.num_patches)
        return base + (1 if rem else 0)

    def copy(self):
        return replace(
            self, enc=self.enc.copy(), dec=self.dec.copy(), dec_bias=self.dec_bias.copy()
        )


def init_params(height, width, k, patch_size=16, seed=0, **kwargs):
    """Fresh params: orthonormal maps scaled by 0.1, w=2, b=0, zero bias."""
    n = (height // patch_size) * (width // patch_size)
    d = 3 * patch_size**2
    base, rem = divmod(k, n)
    m = 2 * (base + (1 if rem else 0))
    if m > d:
        raise ValueError(f"per-patch budget {m} reals exceeds patch dim {d}")
    rng = np.random.default_rng(seed)
    q_enc, _ = np.linalg.qr(rng.standard_normal((d, m)))
    q_dec, _ = np.linalg.qr(rng.standard_normal((d, m)))
    return CodecParams(
        height=height,
        width=width,
        patch_size=patch_size,
        k=k,
        enc=0.1 * q_enc.T,
        dec=0.1 * q_dec,
        dec_bias=np.zeros(d),
        **kwargs,
    )


def _budget_mask(params, budgets):
    """(N, 2*k_max) 0/1: which symbol reals each patch transmits."""
    cols = np.arange(2 * params.k_max)
    return (cols[None, :] < 2 * budgets[:, None]).astype(float)


def gated_symbols(img, mask, params):
    """Pre-normalization symbols: (z_raw (k,) complex, budgets).

    Patch j contributes its first budgets[j] symbols, gated by its
    motion gain; patches are concatenated in row-major order.
    """
    x = patchify(img, params.patch_size)
    coverage = motion_coverage(mask, params.patch_size)
    gains = gate(coverage, params.gate_w, params.gate_b, params.epsilon)
    budgets = allocate_budgets(params.k, coverage)
    sym = x @ params.enc.T  # (N, 2*k_max) interleaved re/im
    keep = _budget_mask(params, budgets).astype(bool)
    reals = (gains[:, None] * sym)[keep]
    return reals[0::2] + 1j * reals[1::2], budgets


def mast_encode(img, mask, params):
    """Image + mask -> power-normalized vector of exactly k symbols."""
    z, _ = gated_symbols(img, mask, params)
    return power_normalize(z)


def _fill_symbol_matrix(params, values, budgets):
    """Scatter a flat complex vector back to (N, 2*k_max) interleaved
    reals; untransmitted slots are zero."""
    keep = _budget_mask(params, budgets).astype(bool)
    out = np.zeros((params.num_patches, 2 * params.k_max))
    flat = np.empty(2 * len(values))
    flat[0::2] = values.real
    flat[1::2] = values.imag
    out[keep] = flat
    return out


def mast_decode(zhat, params, budgets=None):
    """Received symbols -> image, clipped to [0,1].

    budgets: the per-patch symbol split chosen at the encoder. The
    allocation depends on the transmitter's motion coverage, so it
    travels as side info; None is allowed when k splits evenly.
    """
    zhat = np.asarray(zhat, dtype=complex)
    if zhat.shape != (params.k,):
        raise ValueError(f"expected {params.k} symbols, got {zhat.shape}")
    if budgets is None:
        if params.k % params.num_patches:
            raise ValueError("k does not split evenly; pass the encoder budgets")
        budgets = np.full(params.num_patches, params.k // params.num_patches)
    u = _fill_symbol_matrix(params, zhat, budgets)
    patches = u @ params.dec.T + params.dec_bias
    return np.clip(unpatchify(patches, params.height, params.width, params.patch_size), 0.0, 1.0)


def mast_transmit(img, mask, params, cfg):
    """encode -> channel -> decode, carrying the budget side info."""
    z, budgets = gated_symbols(img, mask, params)
    zhat = transmit(power_normalize(z), cfg)
    return mast_decode(zhat, params, budgets)


def loss_motion_weighted(ref, rec, mask, alpha):
    """Mean over elements of squared error times (1 + alpha*mask)."""
    ref = np.asarray(ref, dtype=float)
    rec = np.asarray(rec, dtype=float)
    if ref.shape != rec.shape:
        raise ValueError("image dimensions do not match")
    weight = 1.0 + alpha * np.asarray(mask, dtype=float)[..., None]
    return float(np.mean(weight * (ref - rec) ** 2))


@dataclass
class CodecGrads:
    enc: np.ndarray
    dec: np.ndarray
    dec_bias: np.ndarray
    gate_w: float
    gate_b: float


def loss_and_grads(params, img, mask, noise):
    """Forward + analytic backward for one image and one noise draw.

    The loss is the motion-weighted squared error between the input and
    the *pre-clip* decoder output (clip has zero gradient wherever it
    binds). noise is the (k,) complex channel perturbation, held fixed
    so finite differences see the same function.
    """
    p = params
    x = patchify(img, p.patch_size)
    coverage = motion_coverage(mask, p.patch_size)
    pre = p.gate_w * coverage + p.gate_b
    sig = expit(pre)
    gains = sig + p.epsilon
    budgets = allocate_budgets(p.k, coverage)
    bmask = _budget_mask(p, budgets)

    c = x @ p.enc.T  # (N, m)
    y = gains[:, None] * c
    yb = y * bmask
    ssq = float(np.sum(yb * yb))
    if ssq == 0.0:
        raise ValueError("cannot power-normalize a zero vector")
    scale = math.sqrt(p.k / ssq)  # (1/k) sum |z|^2 == 1 after scaling
    z = scale * yb
    u = z + _fill_symbol_matrix(p, np.asarray(noise, dtype=complex), budgets)
    xh = u @ p.dec.T + p.dec_bias

    weight = patchify(
        np.broadcast_to(
            (1.0 + p.alpha * np.asarray(mask, dtype=float))[..., None],
            img.shape,
        ),
        p.patch_size,
    )
    resid = xh - x
    n_el = x.size
    loss = float(np.sum(weight * resid * resid) / n_el)

    g_xh = 2.0 * weight * resid / n_el
    d_bias = g_xh.sum(axis=0)
    d_dec = g_xh.T @ u
    g_u = g_xh @ p.dec
    g_z = g_u * bmask
    # z = scale(yb) * yb, quotient rule through scale = sqrt(k/ssq)
    dot = float(np.sum(g_z * yb))
    g_yb = scale * g_z - (scale * dot / ssq) * yb
    g_y = g_yb * bmask
    g_c = gains[:, None] * g_y
    d_enc = g_c.T @ x
    g_gain = np.sum(g_y * c, axis=1)
    dsig = sig * (1.0 - sig)
    d_w = float(np.sum(g_gain * dsig * coverage))
    d_b = float(np.sum(g_gain * dsig))
    return loss, CodecGrads(d_enc, d_dec, d_bias, d_w, d_b)


def training_loss(params, img, mask, noise):
    """Loss only; the finite-difference oracle probes this function."""
    return loss_and_grads(params, img, mask, noise)[0]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 8
    step_size: float = 1e-2
    snr_lo: float = 0.0  # training SNR drawn per sample, uniform in dB
    snr_hi: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.snr_lo > self.snr_hi:
            raise ValueError("snr_lo must be <= snr_hi")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


class TrainingDiverged(RuntimeError):
    pass


def train(dataset, cfg, p0):
    """SGD over (image, mask) pairs; returns (params, per-epoch losses).

    One rng drives shuffling, SNR draws and noise draws, so equal seeds
    give identical runs; alpha does not touch the draw sequence, which
    keeps paired loss-weight comparisons noise-identical.
    """
    if not dataset:
        raise ValueError("dataset must be non-empty")
    rng = np.random.default_rng(cfg.seed)
    params = p0.copy()
    trace = []
    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            acc = None
            for idx in batch:
                img, mask = dataset[idx]
                snr = rng.uniform(cfg.snr_lo, cfg.snr_hi)
                sigma2 = snr_to_noise_power(snr)
                if sigma2 == 0.0:
                    noise = np.zeros(params.k, dtype=complex)
                else:
                    re, im = rng.standard_normal((2, params.k))
                    noise = math.sqrt(sigma2 / 2.0) * (re + 1j * im)
                loss, grads = loss_and_grads(params, img, mask, noise)
                if not math.isfinite(loss):
                    raise TrainingDiverged(
                        f"loss became non-finite at epoch {epoch}, step {step}"
                    )
                epoch_losses.append(loss)
                if acc is None:
                    acc = grads
                else:
                    acc = CodecGrads(
                        acc.enc + grads.enc,
                        acc.dec + grads.dec,
                        acc.dec_bias + grads.dec_bias,
                        acc.gate_w + grads.gate_w,
                        acc.gate_b + grads.gate_b,
                    )
            lr = cfg.step_size / len(batch)
            params.enc -= lr * acc.enc
            params.dec -= lr * acc.dec
            params.dec_bias -= lr * acc.dec_bias
            params.gate_w -= lr * acc.gate_w
            params.gate_b -= lr * acc.gate_b
            step += 1
        trace.append(float(np.mean(epoch_losses)))
    return params, trace


def save_params(path, params):
    """JSON header line + flat little-endian float payload.

    Payload order: enc, dec, dec_bias, gate_w, gate_b.
    """
    header = {
        "height": params.height,
        "width": params.width,
        "patch_size": params.patch_size,
        "k": params.k,
        "epsilon": params.epsilon,
        "alpha": params.alpha,
        "dtype": PARAMS_DTYPE,
    }
    flat = np.concatenate(
        [
            params.enc.ravel(),
            params.dec.ravel(),
            params.dec_bias,
            [params.gate_w, params.gate_b],
        ]
    ).astype(PARAMS_DTYPE)
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("ascii"))
        fh.write(flat.tobytes())


def load_params(path):
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        flat = np.frombuffer(fh.read(), dtype=header["dtype"]).astype(float)
    n = (header["height"] // header["patch_size"]) * (header["width"] // header["patch_size"])
    base, rem = divmod(header["k"], n)
    m = 2 * (base + (1 if rem else 0))
    d = 3 * header["patch_size"] ** 2
    sizes = [m * d, d * m, d, 1, 1]
    if flat.size != sum(sizes):
        raise ValueError("params payload does not match its header")
    parts = np.split(flat, np.cumsum(sizes)[:-1])
    return CodecParams(
        height=header["height"],
        width=header["width"],
        patch_size=header["patch_size"],
        k=header["k"],
        enc=parts[0].reshape(m, d),
        dec=parts[1].reshape(d, m),
        dec_bias=parts[2],
        gate_w=float(parts[3][0]),
        gate_b=float(parts[4][0]),
        epsilon=header["epsilon"],
        alpha=header["alpha"],
    )
