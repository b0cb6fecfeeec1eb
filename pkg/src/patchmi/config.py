"""Shared sampler configuration."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

SELECTION_MODES = ("random", "center")


@dataclass
class SamplerConfig:
    """Knobs for the scoring and selection pipeline.

    Defaults follow the recommended operating point: 7x7 patches and
    alpha = 0.3. Footage from a hovering camera tends to prefer a higher
    alpha (around 0.6) for a smoother motion distribution.
    """

    patch_size: int = 7
    alpha: float = 0.3
    num_frames: int | None = None
    mode: str = "center"
    seed: int = 0
    clips: int = 1
    allow_repeat: bool = False
    exclude_t0_mass: bool = False
    histogram_bins: int = 64
    jitter: float = 1e-8

    def validate(self) -> None:
        if self.patch_size < 1:
            raise ConfigError("patch size must be at least 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be within [0, 1], got {self.alpha}")
        if self.num_frames is not None and self.num_frames < 1:
            raise ConfigError("frame budget must be at least 1")
        if self.mode not in SELECTION_MODES:
            raise ConfigError(f"mode must be one of {SELECTION_MODES}, got {self.mode!r}")
        if self.clips < 1:
            raise ConfigError("clips must be at least 1")
        if self.histogram_bins < 2:
            raise ConfigError("histogram bins must be at least 2")
        if not self.jitter > 0.0:
            raise ConfigError("jitter must be positive")
