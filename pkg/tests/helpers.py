"""Shared test utilities and independent oracles."""

from __future__ import annotations

import math

import numpy as np

from patchmi import FrameSequence


def random_frame(rng: np.random.Generator, h: int = 64, w: int = 64, c: int = 1) -> np.ndarray:
    return rng.random((h, w, c))


def random_sequence(rng: np.random.Generator, t: int, h: int, w: int, c: int) -> FrameSequence:
    return FrameSequence(rng.random((t, h, w, c)))


def quantized_sequence(rng: np.random.Generator, t: int, h: int, w: int, c: int) -> FrameSequence:
    """A sequence already on the u8 lattice, so container round trips are exact."""
    data = rng.integers(0, 256, size=(t, h, w, c), dtype=np.uint8)
    return FrameSequence(data.astype(np.float64) / 255.0)


def brute_force_euclidean(a: np.ndarray, b: np.ndarray) -> float:
    total = 0.0
    for x, y in zip(a.ravel().tolist(), b.ravel().tolist()):
        total += (x - y) ** 2
    return math.sqrt(total)


def brute_force_histogram_mi(a: np.ndarray, b: np.ndarray, bins: int) -> float:
    """Direct summation over the joint pixel co-occurrence histogram."""
    counts = [[0] * bins for _ in range(bins)]
    n = 0
    for x, y in zip(a.ravel().tolist(), b.ravel().tolist()):
        i = min(int(x * bins), bins - 1)
        j = min(int(y * bins), bins - 1)
        counts[i][j] += 1
        n += 1
    px = [sum(row) / n for row in counts]
    py = [sum(counts[i][j] for i in range(bins)) / n for j in range(bins)]
    total = 0.0
    for i in range(bins):
        for j in range(bins):
            pxy = counts[i][j] / n
            if pxy > 0.0:
                total += pxy * math.log(pxy / (px[i] * py[j]))
    return total


def permute_patches(frame: np.ndarray, grid, perm: np.ndarray) -> np.ndarray:
    """Rebuild a frame with its patch positions permuted by ``perm``."""
    r = grid.patch_size
    tiles = (
        frame.reshape(grid.rows, r, grid.cols, r, grid.channels)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid.num_patches, r, r, grid.channels)
    )
    shuffled = tiles[perm]
    return (
        shuffled.reshape(grid.rows, grid.cols, r, r, grid.channels)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid.height, grid.width, grid.channels)
    )
