"""Patch extraction: turn an adjacent frame pair into a joint sample matrix.

Each frame is cut into non-overlapping r x r patches (partial patches at
the right/bottom edges are dropped). Corresponding patches from the two
frames are flattened and stacked, giving one 2d-dimensional sample per
patch position and a 2d x N matrix for the pair, where d = r*r*C and
N = rows * cols. Pure gather, no arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PatchGrid:
    height: int
    width: int
    channels: int
    patch_size: int

    @property
    def rows(self) -> int:
        return self.height // self.patch_size

    @property
    def cols(self) -> int:
        return self.width // self.patch_size

    @property
    def num_patches(self) -> int:
        return self.rows * self.cols

    @property
    def dim(self) -> int:
        return self.patch_size * self.patch_size * self.channels


@dataclass(frozen=True)
class PatchMatrix:
    """Joint samples for one frame pair: shape (2d, N).

    Rows 0..d-1 hold the earlier frame's patch vectors, rows d..2d-1 the
    later frame's. Column j is patch position j in row-major grid order;
    within a patch, pixels flatten row-major with channels innermost.
    """

    data: np.ndarray
    grid: PatchGrid


def make_grid(height: int, width: int, channels: int, patch_size: int) -> PatchGrid:
    """Validated grid constructor.

    Requires N > 2d so the joint sample covariance can be full rank;
    smaller frames (or a large patch size) make the Gaussian model
    degenerate by construction, so this is a hard error.
    """
    if patch_size < 1:
        raise ConfigError("patch size must be at least 1")
    if channels not in (1, 3):
        raise ConfigError(f"channel count must be 1 or 3, got {channels}")
    if patch_size > min(height, width):
        raise ConfigError(
            f"patch size {patch_size} exceeds frame dimensions {height}x{width}"
        )
    grid = PatchGrid(height, width, channels, patch_size)
    if grid.num_patches <= 2 * grid.dim:
        raise ConfigError(
            f"grid yields N={grid.num_patches} patches but needs more than "
            f"2d={2 * grid.dim}; increase resolution or decrease patch size"
        )
    return grid


def _ensure_hwc(frame: np.ndarray, grid: PatchGrid) -> np.ndarray:
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim == 2 and grid.channels == 1:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape != (grid.height, grid.width, grid.channels):
        raise ConfigError(
            f"frame shape {arr.shape} does not match grid "
            f"{grid.height}x{grid.width}x{grid.channels}"
        )
    return arr


def _patch_vectors(frame: np.ndarray, grid: PatchGrid) -> np.ndarray:
    r = grid.patch_size
    cropped = frame[: grid.rows * r, : grid.cols * r, :]
    stacked = (
        cropped.reshape(grid.rows, r, grid.cols, r, grid.channels)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid.num_patches, grid.dim)
    )
    return np.ascontiguousarray(stacked.T)


def embed_pair(frame_prev: np.ndarray, frame_curr: np.ndarray, grid: PatchGrid) -> PatchMatrix:
    """Gather the (2d, N) joint patch matrix for one adjacent pair."""
    prev = _patch_vectors(_ensure_hwc(frame_prev, grid), grid)
    curr = _patch_vectors(_ensure_hwc(frame_curr, grid), grid)
    return PatchMatrix(np.concatenate([prev, curr], axis=0), grid)
