"""Inverse-CDF segmentation and per-segment frame selection.

The cumulative motion distribution is cut at thresholds k/N. Each
threshold's real-valued crossing point is found by linear interpolation
between the two frame indices whose CDF values bracket it (with a
virtual anchor of 0 before frame 0), rounded half-up, then boundaries
are monotonized and clamped so every segment holds at least one frame.
One frame per segment is then picked: uniformly at random from a seeded
PCG64 generator (one draw per segment, in segment order), or the lower
median in center mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SamplerConfig
from .errors import ConfigError
from .frame_io import FrameSequence
from .metrics import MetricKind
from .scoring import ScoreSeries, score_video


@dataclass(frozen=True)
class Segmentation:
    """Boundary indices: length N+1, starting at -1 and ending at T-1.

    Segment k covers the half-open index range (boundaries[k],
    boundaries[k+1]], i.e. frames boundaries[k]+1 .. boundaries[k+1].
    """

    boundaries: tuple[int, ...]
    num_frames: int

    @property
    def segments(self) -> list[tuple[int, int]]:
        return [
            (self.boundaries[k] + 1, self.boundaries[k + 1])
            for k in range(len(self.boundaries) - 1)
        ]


@dataclass
class ClipSelection:
    """One clip of a dense selection: frame range [start, stop) plus detail."""

    start: int
    stop: int
    indices: tuple[int, ...]
    segmentation: Segmentation | None
    scores: ScoreSeries | None
    padded: bool = False


@dataclass
class SelectionReport:
    """Chosen frame indices plus full provenance."""

    indices: tuple[int, ...]
    mode: str
    seed: int
    segmentation: Segmentation | None
    scores: ScoreSeries | None = None
    config: SamplerConfig | None = None
    padded: bool = False
    clips: tuple[ClipSelection, ...] | None = field(default=None, repr=False)


def segment(cdf: np.ndarray, num_segments: int) -> Segmentation:
    """Split frames into segments holding roughly 1/N of the motion mass each."""
    values = np.asarray(cdf, dtype=np.float64)
    total = len(values)
    n = num_segments
    if n < 1:
        raise ConfigError("need at least 1 segment")
    if n > total:
        raise ConfigError(
            f"cannot cut {total} frames into {n} segments; use --allow-repeat or reduce N"
        )

    boundaries = [-1]
    for k in range(1, n):
        threshold = k / n
        j = int(np.searchsorted(values, threshold, side="left"))
        j = min(j, total - 1)
        left_index, left_value = (j - 1, float(values[j - 1])) if j > 0 else (-1, 0.0)
        right_value = float(values[j])
        crossing = left_index + (threshold - left_value) / (right_value - left_value)
        rounded = math.floor(crossing + 0.5)
        rounded = max(rounded, boundaries[-1] + 1)
        rounded = min(rounded, total - 1 - (n - k))
        boundaries.append(rounded)
    boundaries.append(total - 1)
    return Segmentation(tuple(boundaries), total)


def select(
    segmentation: Segmentation,
    mode: str = "random",
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> SelectionReport:
    """Pick one frame per segment.

    Random mode uses NumPy's PCG64 stream seeded with ``seed`` (or the
    supplied generator) and makes exactly one draw per segment in
    segment order, so results are reproducible per release.
    """
    segments = segmentation.segments
    if mode == "random":
        gen = rng if rng is not None else np.random.default_rng(seed)
        indices = [int(gen.integers(lo, hi + 1)) for lo, hi in segments]
    elif mode == "center":
        indices = [lo + (hi - lo) // 2 for lo, hi in segments]
    else:
        raise ConfigError(f"unknown selection mode {mode!r}")
    return SelectionReport(
        indices=tuple(indices), mode=mode, seed=seed, segmentation=segmentation
    )


def pad_repeat(num_frames: int, budget: int) -> list[int]:
    """Uniform index sequence with repetition for videos shorter than the budget.

    Index i maps to floor(i * T / budget); earlier indices absorb the
    remainder and repetition counts differ by at most one.
    """
    if num_frames < 1 or budget < 1:
        raise ConfigError("frame count and budget must be positive")
    return [i * num_frames // budget for i in range(budget)]


def _clip_ranges(total: int, clips: int) -> list[tuple[int, int]]:
    base, extra = divmod(total, clips)
    ranges = []
    start = 0
    for i in range(clips):
        stop = start + base + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def dense_clip_select(
    seq: FrameSequence,
    k_clips: int,
    n_per_clip: int,
    metric: MetricKind = MetricKind.PMI,
    config: SamplerConfig | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> SelectionReport:
    """Split the video into K uniform clips and run the sampler inside each.

    A single seeded generator is shared across clips in order, so K = 1
    reproduces plain selection exactly.
    """
    config = config or SamplerConfig()
    config.validate()
    total = seq.num_frames
    if k_clips < 1:
        raise ConfigError("need at least 1 clip")
    if total < k_clips:
        raise ConfigError(f"cannot split {total} frames into {k_clips} clips")

    gen = np.random.default_rng(seed)
    clip_records: list[ClipSelection] = []
    all_indices: list[int] = []
    for start, stop in _clip_ranges(total, k_clips):
        length = stop - start
        if n_per_clip > length:
            if not config.allow_repeat:
                raise ConfigError(
                    f"clip of {length} frames cannot supply {n_per_clip} distinct frames; "
                    "use --allow-repeat or reduce N"
                )
            local = [start + i for i in pad_repeat(length, n_per_clip)]
            clip_records.append(ClipSelection(start, stop, tuple(local), None, None, padded=True))
        elif length == 1:
            local = [start]
            clip_records.append(ClipSelection(start, stop, tuple(local), None, None))
        else:
            series = score_video(seq.subsequence(start, stop), metric, config, threads)
            seg = segment(series.cdf, n_per_clip)
            picked = select(seg, config.mode, seed, rng=gen)
            local = [start + i for i in picked.indices]
            clip_records.append(ClipSelection(start, stop, tuple(local), seg, series))
        all_indices.extend(local)

    return SelectionReport(
        indices=tuple(all_indices),
        mode=config.mode,
        seed=seed,
        segmentation=None,
        scores=None,
        config=config,
        padded=any(c.padded for c in clip_records),
        clips=tuple(clip_records),
    )


def select_frames(
    seq: FrameSequence,
    metric: MetricKind = MetricKind.PMI,
    config: SamplerConfig | None = None,
    threads: int | None = None,
) -> SelectionReport:
    """Score, segment and select in one call; dispatches on config.clips."""
    config = config or SamplerConfig()
    config.validate()
    if config.num_frames is None:
        raise ConfigError("a frame budget (num_frames) is required for selection")
    n = config.num_frames

    if config.clips > 1:
        return dense_clip_select(seq, config.clips, n, metric, config, config.seed, threads)

    total = seq.num_frames
    if n > total:
        if not config.allow_repeat:
            raise ConfigError(
                f"budget {n} exceeds the {total} available frames; "
                "use --allow-repeat or reduce N"
            )
        return SelectionReport(
            indices=tuple(pad_repeat(total, n)),
            mode=config.mode,
            seed=config.seed,
            segmentation=None,
            scores=None,
            config=config,
            padded=True,
        )

    series = score_video(seq, metric, config, threads)
    seg = segment(series.cdf, n)
    report = select(seg, config.mode, config.seed)
    report.scores = series
    report.config = config
    return report
