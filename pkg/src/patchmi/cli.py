"""Command-line interface: score, select, compare, synth.

Reports are JSON by default (CSV is a flat projection of the same data)
and can be accompanied by a rendered figure via --plot. Exit codes: 1
for ingestion problems, 2 for bad configuration, 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import shutil
import sys
import time
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .config import SamplerConfig
from .errors import ConfigError, IngestError, NumericalError, PatchMiError
from .frame_io import (
    FrameSequence,
    IngestOptions,
    load_container,
    load_directory,
    preprocess,
    quantize_u8,
    write_container,
)
from .metrics import MetricKind
from .plotting import compare_figure, save_figure, score_figure, selection_figure
from .scoring import pair_similarity, score_video
from .selection import SelectionReport, select_frames
from .synth import SceneSpec, render


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise ConfigError(f"expected HxW (e.g. 224x224), got {text!r}") from None


def _parse_int_pair(text: str, what: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"expected two comma-separated integers for {what}, got {text!r}") from None


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="image directory or .pmis container")
    p.add_argument("-o", "--output", help="report file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")
    p.add_argument("--resize", metavar="HxW", help="bilinear resize before scoring")
    p.add_argument("--grayscale", action="store_true", help="convert to luma before scoring")


def _add_scoring_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--patch-size", type=int, default=7, help="patch side length r (default 7)")
    p.add_argument("--alpha", type=float, default=0.3, help="remap smoothness in [0, 1] (default 0.3)")
    p.add_argument("--bins", type=int, default=64, help="histogram MI bin count (default 64)")
    p.add_argument(
        "--exclude-t0-mass",
        action="store_true",
        help="drop frame 0's score mass before remapping",
    )
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker pool size for pairwise scoring (default: machine parallelism; "
        "the PMI_THREADS environment variable overrides this)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patchmi",
        description="Patch-mutual-information motion scoring and adaptive frame selection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score per-frame motion and emit the distribution")
    _add_io_args(p_score)
    p_score.add_argument(
        "--metric",
        default="pmi",
        help="similarity measure: pmi, euclidean, cosine, psnr, histogram_mi",
    )
    _add_scoring_args(p_score)

    p_select = sub.add_parser("select", help="adaptively select N frames")
    _add_io_args(p_select)
    p_select.add_argument("-n", "--num-frames", type=int, required=True, help="frame budget N")
    p_select.add_argument("--metric", default="pmi")
    p_select.add_argument("--seed", type=int, default=0)
    p_select.add_argument("--mode", choices=("random", "center"), default="center")
    p_select.add_argument(
        "--clips", type=int, default=1, help="split into K uniform clips and sample inside each"
    )
    p_select.add_argument(
        "--allow-repeat",
        action="store_true",
        help="permit repeated indices when the video is shorter than the budget",
    )
    p_select.add_argument("--export-frames", metavar="DIR", help="copy/extract chosen frames")
    _add_scoring_args(p_select)

    p_compare = sub.add_parser("compare", help="run several similarity measures side by side")
    _add_io_args(p_compare)
    p_compare.add_argument(
        "--metrics",
        default="pmi,euclidean,cosine,psnr,histogram_mi",
        help="comma-separated metric list",
    )
    _add_scoring_args(p_compare)

    p_synth = sub.add_parser("synth", help="render a synthetic test video to a .pmis container")
    p_synth.add_argument("output", help="container path to write")
    p_synth.add_argument("--size", metavar="HxW", default="64x64")
    p_synth.add_argument("--frames", type=int, default=64)
    p_synth.add_argument("--channels", type=int, choices=(1, 3), default=1)
    p_synth.add_argument("--background", choices=("constant", "gradient", "noise"), default="noise")
    p_synth.add_argument("--background-value", type=float, default=0.5)
    p_synth.add_argument("--sprite-size", type=int, default=16)
    p_synth.add_argument("--sprite-intensity", type=float, default=1.0)
    p_synth.add_argument("--sprite-start", metavar="R,C", default="24,8")
    p_synth.add_argument("--velocity", metavar="DY,DX", default="0,1")
    p_synth.add_argument(
        "--window", metavar="A,B", default="20,40", help="motion window; A,A means no motion"
    )
    p_synth.add_argument("--jitter", type=int, default=0)
    p_synth.add_argument("--seed", type=int, default=0)
    return parser


def _resolve_threads(flag_value: int | None) -> int:
    env = os.environ.get("PMI_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"PMI_THREADS must be an integer, got {env!r}") from None
    if flag_value is not None:
        if flag_value < 1:
            raise ConfigError("--threads must be at least 1")
        return flag_value
    return os.cpu_count() or 1


def _load_input(args: argparse.Namespace) -> FrameSequence:
    path = Path(args.input)
    options = IngestOptions(
        resize_to=_parse_size(args.resize) if args.resize else None,
        grayscale=args.grayscale,
    )
    if path.is_dir():
        return load_directory(path, options)
    if not path.exists():
        raise IngestError(f"input does not exist: {path}")
    return preprocess(load_container(path), options)


def _config_from_args(args: argparse.Namespace) -> SamplerConfig:
    cfg = SamplerConfig(
        patch_size=args.patch_size,
        alpha=args.alpha,
        num_frames=getattr(args, "num_frames", None),
        mode=getattr(args, "mode", "center"),
        seed=getattr(args, "seed", 0),
        clips=getattr(args, "clips", 1),
        allow_repeat=getattr(args, "allow_repeat", False),
        exclude_t0_mass=args.exclude_t0_mass,
        histogram_bins=args.bins,
    )
    cfg.validate()
    return cfg


def _config_echo(args: argparse.Namespace, cfg: SamplerConfig, metric: str | None) -> dict:
    # Deliberately omits the worker-pool size: it cannot affect results,
    # and select reports must be byte-identical across pool sizes.
    echo = {
        "input": str(args.input),
        "patch_size": cfg.patch_size,
        "alpha": cfg.alpha,
        "bins": cfg.histogram_bins,
        "resize": args.resize or None,
        "grayscale": bool(args.grayscale),
        "exclude_t0_mass": bool(cfg.exclude_t0_mass),
    }
    if metric is not None:
        echo["metric"] = metric
    if cfg.num_frames is not None:
        echo.update(
            num_frames=cfg.num_frames,
            seed=cfg.seed,
            mode=cfg.mode,
            clips=cfg.clips,
            allow_repeat=bool(cfg.allow_repeat),
        )
    return echo


def _series_dict(series) -> dict:
    return {
        "raw": [float(v) for v in series.raw],
        "normalized": [float(v) for v in series.normalized],
        "remapped": [float(v) for v in series.remapped],
        "cdf": [float(v) for v in series.cdf],
        "mean": float(series.mean),
        "alpha": float(series.alpha),
    }


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_score(args: argparse.Namespace) -> int:
    metric = MetricKind.parse(args.metric)
    cfg = _config_from_args(args)
    seq = _load_input(args)
    threads = _resolve_threads(args.threads)
    series = score_video(seq, metric, cfg, threads=threads)

    if args.format == "csv":
        rows = [
            [t, repr(float(series.raw[t])), repr(float(series.normalized[t])),
             repr(float(series.remapped[t])), repr(float(series.cdf[t]))]
            for t in range(series.num_frames)
        ]
        _emit(_csv_text(["t", "raw", "normalized", "remapped", "cdf"], rows), args.output)
    else:
        times = series.pair_ms if series.pair_ms is not None else np.array([])
        report = {
            "kind": "score",
            "version": __version__,
            "config": _config_echo(args, cfg, metric.value),
            "num_frames": seq.num_frames,
            "series": _series_dict(series),
            "timing": {
                "pairs": int(times.size),
                "mean_ms": float(times.mean()) if times.size else 0.0,
                "min_ms": float(times.min()) if times.size else 0.0,
                "max_ms": float(times.max()) if times.size else 0.0,
                "total_ms": float(times.sum()) if times.size else 0.0,
            },
        }
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)

    if args.plot:
        save_figure(score_figure(series, metric.value), args.plot)
        _info(f"wrote figure to {args.plot}")
    return 0


def _selection_report_dict(args, cfg: SamplerConfig, metric: MetricKind,
                           seq: FrameSequence, report: SelectionReport) -> dict:
    out = {
        "kind": "select",
        "version": __version__,
        "config": _config_echo(args, cfg, metric.value),
        "num_frames": seq.num_frames,
        "indices": [int(i) for i in report.indices],
        "mode": report.mode,
        "seed": int(report.seed),
        "padded": bool(report.padded),
    }
    if report.segmentation is not None:
        out["boundaries"] = [int(b) for b in report.segmentation.boundaries]
        out["segments"] = [[int(a), int(b)] for a, b in report.segmentation.segments]
    if report.scores is not None:
        out["series"] = _series_dict(report.scores)
    if report.clips is not None:
        out["clips"] = [
            {
                "start": int(c.start),
                "stop": int(c.stop),
                "indices": [int(i) for i in c.indices],
                "padded": bool(c.padded),
                "boundaries": (
                    [int(b) for b in c.segmentation.boundaries] if c.segmentation else None
                ),
                "series": _series_dict(c.scores) if c.scores is not None else None,
            }
            for c in report.clips
        ]
    return out


def _selection_csv(seq: FrameSequence, report: SelectionReport) -> str:
    total = seq.num_frames
    selected = set(report.indices)
    raw = [""] * total
    normalized = [""] * total
    remapped = [""] * total
    cdf = [""] * total
    segment_of = [""] * total

    def fill(series, seg, offset, seg_base):
        if series is not None:
            for i in range(series.num_frames):
                raw[offset + i] = repr(float(series.raw[i]))
                normalized[offset + i] = repr(float(series.normalized[i]))
                remapped[offset + i] = repr(float(series.remapped[i]))
                cdf[offset + i] = repr(float(series.cdf[i]))
        if seg is not None:
            for k, (lo, hi) in enumerate(seg.segments):
                for i in range(lo, hi + 1):
                    segment_of[offset + i] = str(seg_base + k)

    if report.clips is not None:
        base = 0
        for clip in report.clips:
            fill(clip.scores, clip.segmentation, clip.start, base)
            base += len(clip.indices)
    else:
        fill(report.scores, report.segmentation, 0, 0)

    rows = [
        [t, raw[t], normalized[t], remapped[t], cdf[t], segment_of[t], int(t in selected)]
        for t in range(total)
    ]
    return _csv_text(["t", "raw", "normalized", "remapped", "cdf", "segment", "selected"], rows)


def _export_frames(seq: FrameSequence, report: SelectionReport, directory: str) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    if seq.source_paths is not None:
        for idx in sorted(set(report.indices)):
            src = seq.source_paths[idx]
            shutil.copy2(src, out / src.name)
        return
    data = quantize_u8(seq.frames)
    for idx in sorted(set(report.indices)):
        frame = data[idx]
        if frame.shape[-1] == 1:
            img = Image.fromarray(frame[:, :, 0], mode="L")
        else:
            img = Image.fromarray(frame, mode="RGB")
        img.save(out / f"frame_{idx:05d}.png")


def cmd_select(args: argparse.Namespace) -> int:
    metric = MetricKind.parse(args.metric)
    cfg = _config_from_args(args)
    seq = _load_input(args)
    threads = _resolve_threads(args.threads)
    report = select_frames(seq, metric, cfg, threads=threads)

    if args.format == "csv":
        _emit(_selection_csv(seq, report), args.output)
    else:
        payload = _selection_report_dict(args, cfg, metric, seq, report)
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)

    if args.export_frames:
        _export_frames(seq, report, args.export_frames)
        _info(f"exported {len(set(report.indices))} frame(s) to {args.export_frames}")
    if args.plot:
        save_figure(selection_figure(report, metric.value), args.plot)
        _info(f"wrote figure to {args.plot}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    names = [m for m in (s.strip() for s in args.metrics.split(",")) if m]
    if not names:
        raise ConfigError("need at least one metric")
    metrics = [MetricKind.parse(m) for m in names]
    cfg = _config_from_args(args)
    seq = _load_input(args)

    from .patches import make_grid

    results: dict[str, dict] = {}
    for metric in metrics:
        grid = (
            make_grid(seq.height, seq.width, seq.channels, cfg.patch_size)
            if metric is MetricKind.PMI
            else None
        )

        def one(t: int) -> float:
            prev, curr = seq.frames[t - 1], seq.frames[t]
            try:
                return pair_similarity(
                    metric, prev, curr, grid=grid, bins=cfg.histogram_bins, jitter=cfg.jitter
                )
            except NumericalError:
                return float("nan")

        # Warm-up pass, then time each pair individually.
        one(1)
        values = [0.0]
        times = []
        for t in range(1, seq.num_frames):
            start = time.perf_counter()
            values.append(one(t))
            times.append((time.perf_counter() - start) * 1000.0)
        finite = [v for v in values[1:] if np.isfinite(v)]
        fill = max(finite) if finite else 0.0
        values = [values[0]] + [v if np.isfinite(v) else fill for v in values[1:]]
        results[metric.value] = {
            "raw": [float(v) for v in values],
            "mean_ms_per_pair": float(np.mean(times)) if times else 0.0,
        }

    if args.format == "csv":
        header = ["t"] + [m.value for m in metrics]
        rows = [
            [t] + [repr(float(results[m.value]["raw"][t])) for m in metrics]
            for t in range(seq.num_frames)
        ]
        _emit(_csv_text(header, rows), args.output)
    else:
        report = {
            "kind": "compare",
            "version": __version__,
            "config": _config_echo(args, cfg, None),
            "num_frames": seq.num_frames,
            "metrics": results,
        }
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)

    if args.plot:
        save_figure(
            compare_figure({name: data["raw"] for name, data in results.items()}), args.plot
        )
        _info(f"wrote figure to {args.plot}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    height, width = _parse_size(args.size)
    window = _parse_int_pair(args.window, "--window")
    spec = SceneSpec(
        height=height,
        width=width,
        channels=args.channels,
        num_frames=args.frames,
        background=args.background,
        background_value=args.background_value,
        sprite_size=args.sprite_size,
        sprite_intensity=args.sprite_intensity,
        sprite_start=_parse_int_pair(args.sprite_start, "--sprite-start"),
        velocity=_parse_int_pair(args.velocity, "--velocity"),
        motion_window=None if window[0] == window[1] else window,
        camera_jitter=args.jitter,
        seed=args.seed,
    )
    seq = render(spec)
    write_container(seq, args.output)
    _info(f"wrote {seq.num_frames} frames ({seq.height}x{seq.width}x{seq.channels}) to {args.output}")
    return 0


_COMMANDS = {
    "score": cmd_score,
    "select": cmd_select,
    "compare": cmd_compare,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PatchMiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
