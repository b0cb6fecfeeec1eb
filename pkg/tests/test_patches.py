"""Patch grids and joint patch-sample matrices."""

import numpy as np
import pytest

from patchmi import ConfigError, PatchGrid, embed_pair, make_grid


class TestMakeGrid:
    def test_standard_hd_grid(self):
        grid = make_grid(224, 224, 3, 7)
        assert (grid.rows, grid.cols) == (32, 32)
        assert grid.num_patches == 1024
        assert grid.dim == 147

    def test_edge_pixels_are_truncated(self):
        grid = make_grid(225, 225, 3, 7)
        assert (grid.rows, grid.cols) == (32, 32)

    def test_too_few_patches_for_rank(self):
        # 14x14 with r=7 gives N=4 <= 2d=294: degenerate by construction.
        with pytest.raises(ConfigError, match="increase resolution or decrease patch size"):
            make_grid(14, 14, 3, 7)

    def test_patch_larger_than_frame(self):
        with pytest.raises(ConfigError, match="exceeds"):
            make_grid(6, 20, 1, 7)

    def test_patch_size_must_be_positive(self):
        with pytest.raises(ConfigError):
            make_grid(64, 64, 1, 0)


class TestEmbedPair:
    def test_single_patch_concatenates_both_frames(self):
        rng = np.random.default_rng(0)
        a = rng.random((7, 7, 1))
        b = rng.random((7, 7, 1))
        grid = PatchGrid(7, 7, 1, 7)
        pm = embed_pair(a, b, grid)
        assert pm.data.shape == (98, 1)
        np.testing.assert_array_equal(pm.data[:49, 0], a.ravel())
        np.testing.assert_array_equal(pm.data[49:, 0], b.ravel())

    def test_identical_frames_duplicate_row_blocks(self):
        rng = np.random.default_rng(1)
        a = rng.random((8, 8, 1))
        grid = PatchGrid(8, 8, 1, 4)
        pm = embed_pair(a, a, grid)
        d = grid.dim
        np.testing.assert_array_equal(pm.data[:d], pm.data[d:])

    def test_column_order_is_row_major_over_the_grid(self):
        # 14x7 grayscale with r=7: two patches stacked vertically.
        top = np.arange(49, dtype=np.float64).reshape(7, 7, 1) / 100.0
        bottom = top + 0.5
        a = np.concatenate([top, bottom], axis=0)
        b = a * 0.5
        grid = PatchGrid(14, 7, 1, 7)
        pm = embed_pair(a, b, grid)
        assert pm.data.shape == (98, 2)
        np.testing.assert_array_equal(pm.data[:49, 0], top.ravel())
        np.testing.assert_array_equal(pm.data[:49, 1], bottom.ravel())
        np.testing.assert_array_equal(pm.data[49:, 0], (top * 0.5).ravel())

    def test_channels_flatten_innermost(self):
        frame = np.zeros((2, 2, 3))
        frame[0, 0] = [0.1, 0.2, 0.3]
        frame[0, 1] = [0.4, 0.5, 0.6]
        grid = PatchGrid(2, 2, 3, 2)
        pm = embed_pair(frame, frame, grid)
        np.testing.assert_array_equal(pm.data[:6, 0], [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])

    def test_block_swap_symmetry(self):
        rng = np.random.default_rng(2)
        a, b = rng.random((16, 16, 1)), rng.random((16, 16, 1))
        grid = PatchGrid(16, 16, 1, 4)
        ab = embed_pair(a, b, grid).data
        ba = embed_pair(b, a, grid).data
        d = grid.dim
        np.testing.assert_array_equal(ab[:d], ba[d:])
        np.testing.assert_array_equal(ab[d:], ba[:d])

    def test_patch_permutation_permutes_columns_only(self):
        rng = np.random.default_rng(3)
        grid = PatchGrid(12, 12, 1, 4)
        a, b = rng.random((12, 12, 1)), rng.random((12, 12, 1))
        perm = rng.permutation(grid.num_patches)

        def permute_patches(frame):
            r = grid.patch_size
            tiles = (
                frame.reshape(grid.rows, r, grid.cols, r, 1)
                .transpose(0, 2, 1, 3, 4)
                .reshape(grid.num_patches, r, r, 1)
            )
            shuffled = tiles[perm]
            return (
                shuffled.reshape(grid.rows, grid.cols, r, r, 1)
                .transpose(0, 2, 1, 3, 4)
                .reshape(12, 12, 1)
            )

        base = embed_pair(a, b, grid).data
        permuted = embed_pair(permute_patches(a), permute_patches(b), grid).data
        np.testing.assert_array_equal(permuted, base[:, perm])

    def test_pure_gather(self):
        rng = np.random.default_rng(4)
        a, b = rng.random((8, 8, 1)), rng.random((8, 8, 1))
        grid = PatchGrid(8, 8, 1, 2)
        pm = embed_pair(a, b, grid)
        source_values = set(a.ravel()) | set(b.ravel())
        assert set(pm.data.ravel()) <= source_values

    def test_dimension_mismatch_rejected(self):
        grid = PatchGrid(8, 8, 1, 2)
        with pytest.raises(ConfigError, match="does not match"):
            embed_pair(np.zeros((8, 8, 1)), np.zeros((8, 9, 1)), grid)
