"""In-process wrapper exposing motion scoring and frame selection over arrays.

Training-loader code hands over a contiguous ``T x H x W x C`` buffer
(u8 or floats already in [0, 1]) and gets back exactly what the
``patchmi`` CLI would produce for the same bytes: u8 input is normalized
by 255 just like container ingestion, and all randomness comes from the
same seeded generator. Caller buffers are never mutated; non-contiguous
input is copied, contiguous input is viewed. The numeric kernels run in
NumPy/BLAS, which drops the GIL, so loader workers overlap.
"""

from __future__ import annotations

import numpy as np

from patchmi import (
    FrameSequence,
    MetricKind,
    SamplerConfig,
    ScoreSeries,
    SelectionReport,
    score_video,
    select_frames as _select_frames,
)
from patchmi import __version__ as _core_version

__version__ = "0.1.0"

__all__ = ["score_frames", "select_frames", "version"]

_CONFIG_FIELDS = (
    "patch_size",
    "alpha",
    "num_frames",
    "mode",
    "seed",
    "clips",
    "allow_repeat",
    "exclude_t0_mass",
    "histogram_bins",
    "jitter",
)


def version() -> str:
    """Wrapper version plus the core library it was built against."""
    return f"{__version__} (patchmi {_core_version})"


def _as_sequence(view) -> FrameSequence:
    arr = np.asarray(view)
    if arr.ndim != 4:
        raise ValueError(
            f"expected a contiguous T x H x W x C buffer, got {arr.ndim}-D shape {arr.shape}"
        )
    if not arr.flags["C_CONTIGUOUS"]:
        arr = np.ascontiguousarray(arr)
    if arr.dtype == np.uint8:
        frames = arr.astype(np.float64) / 255.0
    elif np.issubdtype(arr.dtype, np.floating):
        frames = arr.astype(np.float64, copy=False)
        lo, hi = float(frames.min()), float(frames.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"float intensities must lie in [0, 1], got range [{lo}, {hi}]")
    else:
        raise TypeError(f"unsupported dtype {arr.dtype}; pass u8 or floats in [0, 1]")
    return FrameSequence(frames)


def _build_config(config: SamplerConfig | None, overrides: dict) -> SamplerConfig:
    cfg = SamplerConfig(**{f: getattr(config, f) for f in _CONFIG_FIELDS}) if config else SamplerConfig()
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _CONFIG_FIELDS:
            raise TypeError(f"unknown config field {key!r}")
        setattr(cfg, key, value)
    cfg.validate()
    return cfg


def score_frames(
    view,
    metric: str | MetricKind = "pmi",
    config: SamplerConfig | None = None,
    **overrides,
) -> ScoreSeries:
    """Score a frame buffer; numerically identical to the CLI on the same bytes."""
    kind = metric if isinstance(metric, MetricKind) else MetricKind.parse(metric)
    cfg = _build_config(config, overrides)
    return score_video(_as_sequence(view), kind, cfg)


def select_frames(
    view,
    num_frames: int,
    metric: str | MetricKind = "pmi",
    config: SamplerConfig | None = None,
    seed: int | None = None,
    **overrides,
) -> list[int]:
    """Select ``num_frames`` indices; equal to the CLI with the same config and seed."""
    kind = metric if isinstance(metric, MetricKind) else MetricKind.parse(metric)
    overrides.setdefault("num_frames", num_frames)
    if seed is not None:
        overrides["seed"] = seed
    cfg = _build_config(config, overrides)
    report: SelectionReport = _select_frames(_as_sequence(view), kind, cfg)
    return [int(i) for i in report.indices]
