"""Synthetic moving-object scenes with exact ground truth.

Objects are hard-rasterized discs or squares on a plain background,
moving at constant velocity from frame 0 until an optional stop frame,
after which they stay parked at their final position. Ground truth
(trajectories, per-object motion windows, ordering, sweep supports) is
derived from the same kinematics the renderer uses, so it is exact.

Positions are (row, col) floats; velocities are pixels per frame.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .probe import compass_sector

# (row, col) unit steps of the 8 compass directions; north is -row.
COMPASS_STEPS = {
    "E": (0.0, 1.0),
    "NE": (-1.0, 1.0),
    "N": (-1.0, 0.0),
    "NW": (-1.0, -1.0),
    "W": (0.0, -1.0),
    "SW": (1.0, -1.0),
    "S": (1.0, 0.0),
    "SE": (1.0, 1.0),
}

REJECTION_LIMIT = 10_000


@dataclass(frozen=True)
class SceneObject:
    shape: str  # "disc" or "square"
    radius: float
    color: tuple
    p0: tuple  # (row, col) at frame 0
    velocity: tuple = (0.0, 0.0)  # (drow, dcol) per frame
    stop_frame: int | None = None  # parks after this frame; None = never stops

    def __post_init__(self):
        if self.shape not in ("disc", "square"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def position(self, t, frames):
        """Center at integer frame t, honoring the stop frame."""
        stop = frames - 1 if self.stop_frame is None else self.stop_frame
        teff = min(t, stop)
        return (
            self.p0[0] + self.velocity[0] * teff,
            self.p0[1] + self.velocity[1] * teff,
        )

    @property
    def is_mover(self):
        return self.velocity[0] != 0.0 or self.velocity[1] != 0.0


@dataclass(frozen=True)
class SceneSpec:
    height: int
    width: int
    frames: int
    background: tuple = (0.0, 0.0, 0.0)
    objects: tuple = ()

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        for i, obj in enumerate(self.objects):
            for t in range(self.frames):
                r, c = obj.position(t, self.frames)
                if not (
                    obj.radius <= r <= self.height - 1 - obj.radius
                    and obj.radius <= c <= self.width - 1 - obj.radius
                ):
                    raise ValueError(f"object {i} leaves the canvas at frame {t}")


@dataclass
class SceneTruth:
    """Exact kinematic ground truth for one rendered scene."""

    positions: np.ndarray  # (n_objects, T, 2) centers
    entry_frame: list  # first frame of motion (0 for movers, 0 for static)
    exit_frame: list  # last frame of motion; 0 for static objects
    moving_at_end: list  # bool per object
    direction: list  # 8-way compass label or None
    supports: list = field(default_factory=list)  # (H, W) bool sweep unions

    def moved_later(self, i, j):
        """True if object i kept moving strictly later than object j."""
        return self.exit_frame[i] > self.exit_frame[j]

    @property
    def last_mover(self):
        """Index of the object that kept moving the longest."""
        movers = [i for i, e in enumerate(self.exit_frame) if e > 0]
        if not movers:
            return None
        return max(movers, key=lambda i: self.exit_frame[i])


def _support(spec, obj, t):
    """Hard-rasterized (H, W) bool support of obj at frame t."""
    r, c = obj.position(t, spec.frames)
    rr = np.arange(spec.height, dtype=float)[:, None]
    cc = np.arange(spec.width, dtype=float)[None, :]
    if obj.shape == "disc":
        return (rr - r) ** 2 + (cc - c) ** 2 <= obj.radius**2
    return np.maximum(np.abs(rr - r), np.abs(cc - c)) <= obj.radius


def render(spec):
    """Rasterize a SceneSpec into a ((T,H,W,3) video, SceneTruth) pair."""
    video = np.empty((spec.frames, spec.height, spec.width, 3))
    video[:] = np.asarray(spec.background, dtype=float)
    n = len(spec.objects)
    positions = np.zeros((n, spec.frames, 2))
    supports = [np.zeros((spec.height, spec.width), dtype=bool) for _ in range(n)]
    for t in range(spec.frames):
        for i, obj in enumerate(spec.objects):
            positions[i, t] = obj.position(t, spec.frames)
            sup = _support(spec, obj, t)
            video[t][sup] = np.asarray(obj.color, dtype=float)
            supports[i] |= sup

    entry, exit_, moving_end, direction = [], [], [], []
    for obj in spec.objects:
        if not obj.is_mover:
            entry.append(0)
            exit_.append(0)
            moving_end.append(False)
            direction.append(None)
            continue
        stop = spec.frames - 1 if obj.stop_frame is None else obj.stop_frame
        entry.append(0)
        exit_.append(stop)
        moving_end.append(stop >= spec.frames - 1)
        direction.append(compass_sector(-obj.velocity[0], obj.velocity[1]))

    truth = SceneTruth(
        positions=positions,
        entry_frame=entry,
        exit_frame=exit_,
        moving_at_end=moving_end,
        direction=direction,
        supports=supports,
    )
    return video, truth


def _dilate2(mask):
    """8-connected dilation by 2 pixels (pure numpy shifts)."""
    out = mask.copy()
    for _ in range(2):
        cur = out.copy()
        out[:-1, :] |= cur[1:, :]
        out[1:, :] |= cur[:-1, :]
        out[:, :-1] |= cur[:, 1:]
        out[:, 1:] |= cur[:, :-1]
        out[:-1, :-1] |= cur[1:, 1:]
        out[:-1, 1:] |= cur[1:, :-1]
        out[1:, :-1] |= cur[:-1, 1:]
        out[1:, 1:] |= cur[:-1, :-1]
    return out


def _draw_mover(rng, spec_dims, gray=False, stop_frame=None, disp_frac=(0.45, 0.65)):
    """One in-canvas mover with a compass-aligned velocity."""
    height, width, frames = spec_dims
    radius = float(rng.uniform(3.0, 4.5))
    label = list(COMPASS_STEPS)[rng.integers(8)]
    step = np.asarray(COMPASS_STEPS[label], dtype=float)
    step /= np.hypot(*step)
    horizon = max(frames - 1 if stop_frame is None else stop_frame, 1)
    # speed floor: the sweep must clear its own footprint (no pixel
    # covered in every frame); ceiling: consecutive supports must stay
    # 8-connected so each sweep reads as one trail
    min_speed = (2.0 * radius + 2.5) / horizon
    target = float(rng.uniform(*disp_frac)) * min(height, width)
    speed = min(max(target / horizon, min_speed), 2.0 * radius - 1.0)
    vel = speed * step
    disp = vel * horizon
    margin = radius + 1.0
    lo_r = margin + max(0.0, -disp[0])
    hi_r = height - 1 - margin - max(0.0, disp[0])
    lo_c = margin + max(0.0, -disp[1])
    hi_c = width - 1 - margin - max(0.0, disp[1])
    if lo_r >= hi_r or lo_c >= hi_c:
        return None
    p0 = (float(rng.uniform(lo_r, hi_r)), float(rng.uniform(lo_c, hi_c)))
    if gray:
        g = float(rng.uniform(0.7, 0.95))
        color = (g, g, g)
        shape = "disc"
    else:
        color = tuple(float(x) for x in rng.uniform(0.35, 1.0, size=3))
        shape = "disc" if rng.random() < 0.5 else "square"
    return SceneObject(
        shape=shape,
        radius=radius,
        color=color,
        p0=p0,
        velocity=(float(vel[0]), float(vel[1])),
        stop_frame=stop_frame,
    )


def random_spec(seed, difficulty, height=64, width=64, frames=8):
    """Deterministic scene draw. easy: one gray disc crossing a black
    canvas. hard: two movers (one of which may park mid-video) plus
    sometimes a stationary object, all trails pairwise disjoint."""
    if difficulty not in ("easy", "hard"):
        raise ValueError(f"difficulty must be easy|hard, got {difficulty!r}")
    rng = np.random.default_rng(seed)
    dims = (height, width, frames)

    for attempt in range(REJECTION_LIMIT):
        if difficulty == "easy":
            obj = _draw_mover(rng, dims, gray=True)
            if obj is None:
                continue
            return SceneSpec(height, width, frames, (0.0, 0.0, 0.0), (obj,))

        n_objects = int(rng.integers(2, 4))  # 2 or 3
        # one mover runs the whole video, the other parks early; the
        # separated stop frames keep "which moved last" unambiguous
        park = max(2, int(round(rng.uniform(0.30, 0.45) * (frames - 1))))
        movers = [
            _draw_mover(rng, dims, stop_frame=None, disp_frac=(0.30, 0.45)),
            _draw_mover(rng, dims, stop_frame=park, disp_frac=(0.30, 0.45)),
        ]
        if any(m is None for m in movers):
            continue
        objects = list(movers)
        if n_objects == 3:
            radius = float(rng.uniform(3.0, 6.0))
            margin = radius + 1.0
            p0 = (
                float(rng.uniform(margin, height - 1 - margin)),
                float(rng.uniform(margin, width - 1 - margin)),
            )
            objects.append(
                SceneObject(
                    shape="disc" if rng.random() < 0.5 else "square",
                    radius=radius,
                    color=tuple(float(x) for x in rng.uniform(0.35, 1.0, size=3)),
                    p0=p0,
                )
            )
        spec = SceneSpec(height, width, frames, (0.0, 0.0, 0.0), tuple(objects))
        sweeps = []
        for obj in objects:
            union = np.zeros((height, width), dtype=bool)
            for t in range(frames):
                union |= _support(spec, obj, t)
            sweeps.append(_dilate2(union))
        disjoint = all(
            not (sweeps[i] & sweeps[j]).any()
            for i in range(len(sweeps))
            for j in range(i + 1, len(sweeps))
        )
        if disjoint:
            return spec
    raise RuntimeError(f"rejection sampling failed after {REJECTION_LIMIT} attempts")


def spec_to_dict(spec):
    return {
        "height": spec.height,
        "width": spec.width,
        "frames": spec.frames,
        "background": list(spec.background),
        "objects": [
            {
                "shape": o.shape,
                "radius": o.radius,
                "color": list(o.color),
                "p0": list(o.p0),
                "velocity": list(o.velocity),
                "stop_frame": o.stop_frame,
            }
            for o in spec.objects
        ],
    }


def spec_from_dict(d):
    objects = tuple(
        SceneObject(
            shape=o["shape"],
            radius=o["radius"],
            color=tuple(o["color"]),
            p0=tuple(o["p0"]),
            velocity=tuple(o["velocity"]),
            stop_frame=o["stop_frame"],
        )
        for o in d["objects"]
    )
    return SceneSpec(d["height"], d["width"], d["frames"], tuple(d["background"]), objects)


def truth_to_dict(truth):
    return {
        "positions": truth.positions.tolist(),
        "entry_frame": truth.entry_frame,
        "exit_frame": truth.exit_frame,
        "moving_at_end": truth.moving_at_end,
        "direction": truth.direction,
    }


def save_truth(path, spec, truth):
    """truth.json carries the spec too, so scoring can re-render supports."""
    payload = {"spec": spec_to_dict(spec), "truth": truth_to_dict(truth)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_truth(path):
    with open(path) as fh:
        payload = json.load(fh)
    spec = spec_from_dict(payload["spec"])
    _, truth = render(spec)
    return spec, truth
