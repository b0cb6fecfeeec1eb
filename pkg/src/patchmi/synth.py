"""Deterministic synthetic videos for tests and fixtures.

A scene is a static background with a square sprite that translates at a
fixed integer velocity, but only inside the motion window; outside it
the sprite holds still. Optional camera jitter translates the whole
frame (with wrap-around) by a seeded integer offset each frame, so
adjacent frames outside the window differ only by a global shift. The
offset follows a bounded unit-step random walk, like a continuously
wobbling camera: per-frame displacement never exceeds the jitter bound
and consecutive frames shift by at most one pixel per axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .frame_io import FrameSequence

BACKGROUNDS = ("constant", "gradient", "noise")

# Cell size of the coarse lattice the noise background is upsampled from.
# Correlated noise mimics real footage; iid noise would decorrelate fully
# under a one-pixel camera shift, which no natural background does. The
# field is periodic so camera jitter (a cyclic roll) never creates seams.
NOISE_CELL = 8


@dataclass(frozen=True)
class SceneSpec:
    height: int = 64
    width: int = 64
    channels: int = 1
    num_frames: int = 64
    background: str = "noise"
    background_value: float = 0.5
    sprite_size: int = 16
    sprite_intensity: float = 1.0
    sprite_start: tuple[int, int] = (24, 8)
    velocity: tuple[int, int] = (0, 1)
    motion_window: tuple[int, int] | None = (20, 40)
    camera_jitter: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.height < 1 or self.width < 1 or self.num_frames < 1:
            raise ConfigError("scene dimensions and frame count must be positive")
        if self.channels not in (1, 3):
            raise ConfigError("channels must be 1 or 3")
        if self.background not in BACKGROUNDS:
            raise ConfigError(f"background must be one of {BACKGROUNDS}")
        if not 0.0 <= self.background_value <= 1.0:
            raise ConfigError("background value must be within [0, 1]")
        if not 0.0 <= self.sprite_intensity <= 1.0:
            raise ConfigError("sprite intensity must be within [0, 1]")
        if self.sprite_size < 0:
            raise ConfigError("sprite size must be nonnegative")
        if self.camera_jitter < 0:
            raise ConfigError("camera jitter must be nonnegative")
        if self.motion_window is not None:
            lo, hi = self.motion_window
            if not 0 <= lo <= hi < self.num_frames:
                raise ConfigError(
                    f"motion window {self.motion_window} must lie within [0, {self.num_frames})"
                )


def _sprite_position(spec: SceneSpec, t: int) -> tuple[int, int]:
    if spec.motion_window is None:
        return spec.sprite_start
    lo, hi = spec.motion_window
    steps = min(max(t, lo), hi) - lo
    return (
        spec.sprite_start[0] + spec.velocity[0] * steps,
        spec.sprite_start[1] + spec.velocity[1] * steps,
    )


def _background(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    shape = (spec.height, spec.width, spec.channels)
    if spec.background == "constant":
        return np.full(shape, spec.background_value)
    if spec.background == "gradient":
        ramp_r = np.linspace(0.0, 1.0, spec.height)[:, None]
        ramp_c = np.linspace(0.0, 1.0, spec.width)[None, :]
        return np.broadcast_to(((ramp_r + ramp_c) / 2.0)[:, :, None], shape).copy()
    coarse = rng.uniform(
        0.0,
        1.0,
        (max(1, spec.height // NOISE_CELL), max(1, spec.width // NOISE_CELL), spec.channels),
    )
    return _upsample_periodic(coarse, spec.height, spec.width)


def _upsample_periodic(coarse: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear upsample of a coarse lattice, wrapping at the edges."""
    ch, cw, _ = coarse.shape
    ys = (np.arange(out_h) + 0.5) * (ch / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (cw / out_w) - 0.5
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    y0m, y1m = y0 % ch, (y0 + 1) % ch
    x0m, x1m = x0 % cw, (x0 + 1) % cw
    top = coarse[y0m][:, x0m] * (1.0 - wx) + coarse[y0m][:, x1m] * wx
    bottom = coarse[y1m][:, x0m] * (1.0 - wx) + coarse[y1m][:, x1m] * wx
    return top * (1.0 - wy) + bottom * wy


def render(spec: SceneSpec) -> FrameSequence:
    """Render the scene; byte-deterministic for a given spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    base = _background(spec, rng)

    # Every sprite position must stay inside the frame.
    for t in range(spec.num_frames):
        r, c = _sprite_position(spec, t)
        if spec.sprite_size and not (
            0 <= r and r + spec.sprite_size <= spec.height
            and 0 <= c and c + spec.sprite_size <= spec.width
        ):
            raise ConfigError(f"sprite leaves the frame at t={t} (position {r},{c})")

    frames = np.empty((spec.num_frames, spec.height, spec.width, spec.channels))
    offset = np.zeros(2, dtype=int)
    for t in range(spec.num_frames):
        frame = base.copy()
        if spec.sprite_size:
            r, c = _sprite_position(spec, t)
            frame[r : r + spec.sprite_size, c : c + spec.sprite_size, :] = spec.sprite_intensity
        if spec.camera_jitter:
            offset = np.clip(
                offset + rng.integers(-1, 2, size=2), -spec.camera_jitter, spec.camera_jitter
            )
            frame = np.roll(frame, (int(offset[0]), int(offset[1])), axis=(0, 1))
        frames[t] = frame
    return FrameSequence(frames)
