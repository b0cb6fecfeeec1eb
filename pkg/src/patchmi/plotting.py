"""Figure rendering for score and selection reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scoring import ScoreSeries
from .selection import SelectionReport


def score_figure(
    series: ScoreSeries,
    metric_name: str = "pmi",
    indices: tuple[int, ...] | None = None,
    boundaries: tuple[int, ...] | None = None,
    title: str | None = None,
):
    """Two panels: per-frame motion scores on top, the CDF below.

    Selected frames and segment boundaries are overlaid when given.
    """
    t = np.arange(series.num_frames)
    fig, (ax_scores, ax_cdf) = plt.subplots(
        2, 1, figsize=(9, 6), sharex=True, constrained_layout=True
    )

    ax_scores.plot(t, series.normalized, lw=1.2, color="tab:gray", label="normalized")
    ax_scores.plot(t, series.remapped, lw=1.6, color="tab:blue", label="remapped")
    ax_scores.axhline(series.mean, color="tab:gray", lw=0.8, ls=":", label="mean")
    ax_scores.set_ylabel("motion score")
    ax_scores.legend(loc="upper right", fontsize=8)
    label = title or f"motion scores ({metric_name})"
    ax_scores.set_title(label)

    ax_cdf.plot(t, series.cdf, lw=1.6, color="tab:blue")
    ax_cdf.set_ylabel("cumulative motion")
    ax_cdf.set_xlabel("frame index")
    ax_cdf.set_ylim(-0.02, 1.02)
    if boundaries:
        for b in boundaries[1:-1]:
            ax_cdf.axvline(b + 0.5, color="tab:orange", lw=0.8, ls="--")
    if indices:
        picked = np.asarray(indices)
        ax_cdf.plot(picked, series.cdf[picked], "o", color="tab:red", ms=5, label="selected")
        ax_scores.plot(picked, series.remapped[picked], "o", color="tab:red", ms=5)
        ax_cdf.legend(loc="lower right", fontsize=8)
    return fig


def selection_figure(report: SelectionReport, metric_name: str = "pmi", title: str | None = None):
    """Render a selection report; dense-clip reports show per-clip shading."""
    if report.scores is not None and report.segmentation is not None:
        return score_figure(
            report.scores,
            metric_name,
            indices=report.indices,
            boundaries=report.segmentation.boundaries,
            title=title,
        )

    fig, ax = plt.subplots(figsize=(9, 3), constrained_layout=True)
    if report.clips:
        for i, clip in enumerate(report.clips):
            if i % 2:
                ax.axvspan(clip.start - 0.5, clip.stop - 0.5, color="tab:gray", alpha=0.12)
    picked = np.asarray(report.indices)
    ax.vlines(picked, 0.0, 1.0, color="tab:red", lw=1.2)
    ax.set_yticks([])
    ax.set_xlabel("frame index")
    ax.set_title(title or f"selected frames ({metric_name})")
    return fig


def compare_figure(metric_raw: dict[str, list[float]], title: str | None = None):
    """Overlay per-pair similarity curves, min-max scaled for comparability."""
    fig, ax = plt.subplots(figsize=(9, 4), constrained_layout=True)
    for name, values in metric_raw.items():
        v = np.asarray(values, dtype=np.float64)
        finite = np.isfinite(v)
        span = v[finite].max() - v[finite].min() if finite.any() else 0.0
        scaled = (v - (v[finite].min() if finite.any() else 0.0)) / span if span > 0 else v * 0.0
        ax.plot(np.arange(len(v)), scaled, lw=1.2, label=name)
    ax.set_xlabel("frame index")
    ax.set_ylabel("similarity (min-max scaled)")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return fig


def save_figure(fig, path: str | Path) -> None:
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)
