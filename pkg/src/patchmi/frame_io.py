"""Frame ingestion and the PMIS raw-frame container.

Two input routes produce the same in-memory representation:

* a directory of still images (PNG/JPEG/PPM), ordered by a numeric-aware
  filename sort, intensities rescaled from the stored integer range to
  [0, 1] floats;
* a ``.pmis`` container, a deliberately dumb little-endian format that
  stores u8 frames bit-exactly:

  ========  =====  =======================================
  offset    size   field
  ========  =====  =======================================
  0         4      magic ``PMIS``
  4         2      version (u16, currently 1)
  6         4      height (u32)
  10        4      width (u32)
  14        1      channels (u8, 1 or 3)
  15        1      dtype (u8, 0 = u8 intensities)
  16        2      reserved (u16, 0)
  18        4      frame count T (u32)
  22        ...    T frames, row-major, channel-interleaved
  ========  =====  =======================================

Writing quantizes with round-half-up, so a write/read round trip is the
identity at u8 precision (per-value error at most 1/510).
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ConfigError, IngestError

CONTAINER_MAGIC = b"PMIS"
CONTAINER_VERSION = 1
CONTAINER_SUFFIX = ".pmis"
_HEADER = struct.Struct("<4sHIIBBHI")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".ppm", ".pgm"}

# Rec.601 luma weights, fixed for reproducibility.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class FrameSequence:
    """A decoded video: ``frames`` is (T, H, W, C) float64 in [0, 1].

    ``source_paths`` is kept when the sequence came straight from image
    files and no preprocessing changed the pixels; it lets the CLI copy
    originals when exporting selected frames.
    """

    frames: np.ndarray
    source_paths: tuple[Path, ...] | None = None

    def __post_init__(self) -> None:
        if self.frames.ndim != 4:
            raise IngestError(f"frames must be 4-D (T, H, W, C), got shape {self.frames.shape}")
        if self.channels not in (1, 3):
            raise IngestError(f"channel count must be 1 or 3, got {self.channels}")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def channels(self) -> int:
        return self.frames.shape[3]

    def subsequence(self, start: int, stop: int) -> "FrameSequence":
        paths = self.source_paths[start:stop] if self.source_paths else None
        return FrameSequence(self.frames[start:stop], paths)


@dataclass(frozen=True)
class IngestOptions:
    """Optional decode-time preprocessing: ``resize_to`` is (height, width)."""

    resize_to: tuple[int, int] | None = None
    grayscale: bool = False

    def validate(self) -> None:
        if self.resize_to is not None:
            h, w = self.resize_to
            if h < 1 or w < 1:
                raise ConfigError(f"resize target must be positive, got {h}x{w}")


_NUM_CHUNK = re.compile(r"(\d+)")


def _natural_key(name: str) -> tuple:
    # f_2 must sort before f_10; digit runs compare numerically.
    parts = []
    for tok in _NUM_CHUNK.split(name):
        if not tok:
            continue
        parts.append((1, int(tok), "") if tok.isdigit() else (0, 0, tok.lower()))
    return tuple(parts)


def _decode_image(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode == "L":
                arr = np.asarray(img, dtype=np.float64) / 255.0
                return arr[:, :, None]
            if img.mode in ("I;16", "I;16L", "I;16B"):
                arr = np.asarray(img, dtype=np.float64) / 65535.0
                return arr[:, :, None]
            if img.mode != "RGB":
                img = img.convert("RGB")
            return np.asarray(img, dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise IngestError(f"cannot decode image {path}: {exc}") from exc


def load_directory(path: str | Path, options: IngestOptions | None = None) -> FrameSequence:
    """Load every decodable image under ``path`` as one frame sequence.

    Files are ordered by numeric-aware name sort and must share one
    resolution and channel count. At least two frames are required.
    """
    options = options or IngestOptions()
    options.validate()
    root = Path(path)
    if not root.is_dir():
        raise IngestError(f"not a directory: {root}")
    files = sorted(
        (p for p in root.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: _natural_key(p.name),
    )
    if len(files) < 2:
        raise IngestError(f"need at least 2 frames, found {len(files)} image(s) in {root}")

    frames = []
    for p in files:
        arr = _decode_image(p)
        if frames and arr.shape != frames[0].shape:
            raise IngestError(
                f"mixed frame dimensions: {p.name} is {arr.shape}, expected {frames[0].shape}"
            )
        frames.append(arr)
    seq = FrameSequence(np.stack(frames), source_paths=tuple(files))
    return preprocess(seq, options)


def load_container(path: str | Path) -> FrameSequence:
    """Decode a ``.pmis`` container exactly as stored (u8 values / 255)."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    if len(blob) < _HEADER.size or blob[:4] != CONTAINER_MAGIC:
        raise IngestError(f"not a PMIS container: {path}")
    magic, version, height, width, channels, dtype, _reserved, count = _HEADER.unpack_from(blob)
    if version != CONTAINER_VERSION:
        raise IngestError(f"unsupported container version {version}")
    if channels not in (1, 3):
        raise IngestError(f"unsupported channel count {channels}")
    if dtype != 0:
        raise IngestError(f"unsupported dtype code {dtype}")
    expected = count * height * width * channels
    payload = blob[_HEADER.size:]
    if len(payload) != expected:
        raise IngestError(
            f"truncated container: declared {expected} payload bytes, found {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).reshape(count, height, width, channels)
    return FrameSequence(data.astype(np.float64) / 255.0)


def quantize_u8(frames: np.ndarray) -> np.ndarray:
    """Round-half-up quantization of [0, 1] intensities to u8."""
    return np.floor(frames * 255.0 + 0.5).astype(np.uint8)


def write_container(seq: FrameSequence, path: str | Path) -> None:
    """Write ``seq`` as a ``.pmis`` container (u8, round-half-up)."""
    lo = float(seq.frames.min(initial=0.0))
    hi = float(seq.frames.max(initial=0.0))
    if lo < 0.0 or hi > 1.0:
        raise IngestError(f"intensities outside [0, 1]: range [{lo}, {hi}]")
    header = _HEADER.pack(
        CONTAINER_MAGIC,
        CONTAINER_VERSION,
        seq.height,
        seq.width,
        seq.channels,
        0,
        0,
        seq.num_frames,
    )
    body = quantize_u8(seq.frames).tobytes()
    try:
        Path(path).write_bytes(header + body)
    except OSError as exc:
        raise IngestError(f"cannot write {path}: {exc}") from exc


def _to_grayscale(frames: np.ndarray) -> np.ndarray:
    if frames.shape[-1] == 1:
        return frames
    weights = np.asarray(LUMA_WEIGHTS, dtype=np.float64)
    return (frames @ weights)[..., None]


def _resize_bilinear(frames: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize with a center-aligned sample grid and edge clamping."""
    _, h, w, _ = frames.shape
    if (out_h, out_w) == (h, w):
        return frames.copy()
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    y0f = np.floor(ys)
    x0f = np.floor(xs)
    wy = (ys - y0f)[None, :, None, None]
    wx = (xs - x0f)[None, None, :, None]
    y0 = np.clip(y0f.astype(int), 0, h - 1)
    y1 = np.clip(y0f.astype(int) + 1, 0, h - 1)
    x0 = np.clip(x0f.astype(int), 0, w - 1)
    x1 = np.clip(x0f.astype(int) + 1, 0, w - 1)
    top = frames[:, y0][:, :, x0] * (1.0 - wx) + frames[:, y0][:, :, x1] * wx
    bottom = frames[:, y1][:, :, x0] * (1.0 - wx) + frames[:, y1][:, :, x1] * wx
    return top * (1.0 - wy) + bottom * wy


def preprocess(seq: FrameSequence, options: IngestOptions) -> FrameSequence:
    """Apply grayscale conversion (first) and bilinear resize (second)."""
    options.validate()
    frames = seq.frames
    changed = False
    if options.grayscale and seq.channels == 3:
        frames = _to_grayscale(frames)
        changed = True
    if options.resize_to is not None and options.resize_to != (seq.height, seq.width):
        frames = _resize_bilinear(frames, *options.resize_to)
        changed = True
    if not changed:
        return seq
    return FrameSequence(np.clip(frames, 0.0, 1.0))
