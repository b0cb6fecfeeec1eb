"""From raw pairwise similarity to the cumulative motion distribution.

Pipeline for a T-frame video:

1. raw: M_0 = 0 by convention, M_t = similarity(frame_{t-1}, frame_t);
2. normalized: invert (max_i M_i - M_t, skipped for distance-like
   metrics) and divide by the L1 norm, so high values mean motion;
3. remapped: shifted leaky ReLU through (mu, alpha*mu) and (1, 1),
   renormalized; alpha < 1 polarizes the distribution around the mean;
4. cdf: prefix sums of the remapped scores.

Degenerate pairs (bitwise-identical frames, zero-variance patches, the
+inf PSNR sentinel) carry no motion information; their raw value is
replaced by the per-video maximum of the well-defined similarities. If
every entry ends up equal, the pipeline degrades to a uniform
distribution, the only symmetric choice.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SamplerConfig
from .entropy import pmi
from .errors import ConfigError, NumericalError
from .frame_io import FrameSequence
from .metrics import MetricKind, cosine, euclidean, histogram_mi, psnr
from .patches import PatchGrid, make_grid


@dataclass
class ScoreSeries:
    """Per-frame motion scores; all four vectors share length T."""

    raw: np.ndarray
    normalized: np.ndarray
    remapped: np.ndarray
    cdf: np.ndarray
    mean: float
    alpha: float
    pair_ms: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def num_frames(self) -> int:
        return len(self.raw)


def invert_normalize(raw: np.ndarray) -> np.ndarray:
    """Invert similarities into motion scores and L1-normalize.

    All-equal input (no contrast to distribute) yields the uniform vector.
    """
    values = np.asarray(raw, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ConfigError("need a 1-D score vector of length >= 2")
    if not np.all(np.isfinite(values)):
        raise NumericalError("non-finite raw scores")
    inverted = values.max() - values
    total = float(inverted.sum())
    if total <= 0.0:
        return np.full(values.size, 1.0 / values.size)
    return inverted / total


def l1_normalize(raw: np.ndarray) -> np.ndarray:
    """Plain L1 normalization for distance-like metrics; uniform if all zero."""
    values = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NumericalError("non-finite raw scores")
    total = float(values.sum())
    if total <= 0.0:
        return np.full(values.size, 1.0 / values.size)
    return values / total


def shifted_leaky_map(values: np.ndarray, mean: float, alpha: float) -> np.ndarray:
    """Elementwise piecewise-linear map through (mean, alpha*mean) and (1, 1).

    Scores at or below the mean scale by alpha; scores above follow the
    line joining the shifted origin to (1, 1). Continuous at the knee and
    monotone for alpha in [0, 1].
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be within [0, 1], got {alpha}")
    if not 0.0 <= mean < 1.0:
        raise ConfigError(f"mean must lie in [0, 1), got {mean}")
    x = np.asarray(values, dtype=np.float64)
    above = (1.0 - alpha * mean) / (1.0 - mean) * (x - 1.0) + 1.0
    return np.where(x <= mean, alpha * x, above)


def shifted_leaky_relu(normalized: np.ndarray, alpha: float) -> np.ndarray:
    """Remap normalized scores around their mean, then L1-renormalize."""
    x = np.asarray(normalized, dtype=np.float64)
    mapped = shifted_leaky_map(x, float(x.mean()), alpha)
    total = float(mapped.sum())
    if total <= 0.0:
        # alpha = 0 on an all-equal vector zeroes everything out.
        return np.full(x.size, 1.0 / x.size)
    return mapped / total


def cumulate(remapped: np.ndarray) -> np.ndarray:
    """Prefix sums; the final entry is pinned to exactly 1 after a drift check."""
    values = np.asarray(remapped, dtype=np.float64)
    drift = abs(float(values.sum()) - 1.0)
    if drift > 1e-9:
        raise NumericalError(f"remapped mass drifts from 1 by {drift:.3e}")
    cdf = np.cumsum(values)
    cdf[-1] = 1.0
    return cdf


def pair_similarity(
    metric: MetricKind,
    prev: np.ndarray,
    curr: np.ndarray,
    *,
    grid: PatchGrid | None = None,
    bins: int = 64,
    jitter: float = 1e-8,
) -> float:
    if metric is MetricKind.PMI:
        if grid is None:
            raise ConfigError("PMI needs a patch grid")
        return pmi(prev, curr, grid, base_jitter=jitter).value
    if metric is MetricKind.EUCLIDEAN:
        return euclidean(prev, curr)
    if metric is MetricKind.COSINE:
        return cosine(prev, curr)
    if metric is MetricKind.PSNR:
        return psnr(prev, curr)
    if metric is MetricKind.HISTOGRAM_MI:
        return histogram_mi(prev, curr, bins=bins)
    raise ConfigError(f"unknown metric {metric}")


def _raw_scores(
    seq: FrameSequence,
    metric: MetricKind,
    config: SamplerConfig,
    threads: int | None,
) -> tuple[np.ndarray, np.ndarray]:
    frames = seq.frames
    grid = (
        make_grid(seq.height, seq.width, seq.channels, config.patch_size)
        if metric is MetricKind.PMI
        else None
    )

    def score_one(t: int) -> tuple[float | None, float]:
        start = time.perf_counter()
        prev, curr = frames[t - 1], frames[t]
        if metric.higher_is_similar and np.array_equal(prev, curr):
            value = None  # maximal similarity, filled in below
        else:
            try:
                value = pair_similarity(
                    metric, prev, curr, grid=grid, bins=config.histogram_bins, jitter=config.jitter
                )
            except NumericalError:
                value = None
            if value is not None and not math.isfinite(value):
                value = None
        return value, (time.perf_counter() - start) * 1000.0

    indices = range(1, seq.num_frames)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(score_one, indices))
    else:
        results = [score_one(t) for t in indices]

    values = [v for v, _ in results]
    finite = [v for v in values if v is not None]
    fill = max(finite) if finite else 0.0
    raw = np.array([0.0] + [fill if v is None else v for v in values])
    times = np.array([ms for _, ms in results])
    return raw, times


def score_video(
    seq: FrameSequence,
    metric: MetricKind = MetricKind.PMI,
    config: SamplerConfig | None = None,
    threads: int | None = None,
) -> ScoreSeries:
    """Run the full scoring pipeline over a frame sequence.

    Pairwise similarities may be computed on a worker pool; results are
    bitwise independent of the pool size because each pair is scored in
    isolation and gathered in frame order.
    """
    config = config or SamplerConfig()
    config.validate()
    if seq.num_frames < 2:
        raise ConfigError(f"need at least 2 frames to score, got {seq.num_frames}")

    raw, times = _raw_scores(seq, metric, config, threads)

    if metric.higher_is_similar:
        normalized = invert_normalize(raw)
    else:
        normalized = l1_normalize(raw)

    if config.exclude_t0_mass:
        trimmed = normalized.copy()
        trimmed[0] = 0.0
        tail = float(trimmed.sum())
        if tail > 0.0:
            normalized = trimmed / tail
        else:
            normalized = np.concatenate(
                [[0.0], np.full(len(raw) - 1, 1.0 / (len(raw) - 1))]
            )

    remapped = shifted_leaky_relu(normalized, config.alpha)
    cdf = cumulate(remapped)
    return ScoreSeries(
        raw=raw,
        normalized=normalized,
        remapped=remapped,
        cdf=cdf,
        mean=float(normalized.mean()),
        alpha=config.alpha,
        pair_ms=times,
    )
