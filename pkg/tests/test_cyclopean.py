import numpy as np
import pytest

from cbse.cyclopean import (ViewWeights, build_cyclopean, compute_weights,
                            partition_patches)
from cbse.disparity import DisparityMap
from cbse.saliency import SaliencyMap
from conftest import smooth_texture


def _uniform_disp(shape, value=0):
    return DisparityMap(d=np.full(shape, value, dtype=np.int16),
                        max_disparity=max(abs(value), 1))


def _sal(plane):
    plane = np.asarray(plane, dtype=np.float64)
    return SaliencyMap(s=plane / plane.sum())


class TestComputeWeights:
    def test_symmetric_inputs_half(self):
        s = _sal(smooth_texture(32, 32, seed=1).astype(float) + 1.0)
        w = compute_weights(s, s, _uniform_disp((32, 32)))
        np.testing.assert_array_equal(w.w_left, 0.5)
        np.testing.assert_array_equal(w.w_right, 0.5)

    def test_three_to_one_rms_ratio(self):
        left = _sal(np.full((32, 32), 3.0))
        right = SaliencyMap(s=left.s / 3.0)  # rms_L = 3 rms_R pointwise
        w = compute_weights(left, right, _uniform_disp((32, 32)))
        np.testing.assert_allclose(w.w_left, 0.75, atol=1e-12)
        np.testing.assert_allclose(w.w_right, 0.25, atol=1e-12)

    def test_all_zero_saliency_half(self):
        z = SaliencyMap(s=np.zeros((16, 16)))
        w = compute_weights(z, z, _uniform_disp((16, 16)))
        np.testing.assert_array_equal(w.w_left, 0.5)

    def test_complementarity(self, rng):
        a = _sal(rng.uniform(0.1, 1, (24, 24)))
        b = _sal(rng.uniform(0.1, 1, (24, 24)))
        d = DisparityMap(d=rng.integers(-3, 4, (24, 24)).astype(np.int16),
                         max_disparity=3)
        w = compute_weights(a, b, d)
        np.testing.assert_allclose(w.w_left + w.w_right, 1.0, atol=1e-9)
        assert (w.w_left >= 0).all() and (w.w_right >= 0).all()


class TestBuildCyclopean:
    def test_left_weight_one_returns_left(self, rng):
        left = rng.uniform(0, 255, (20, 20))
        right = rng.uniform(0, 255, (20, 20))
        w = ViewWeights(w_left=np.ones((20, 20)), w_right=np.zeros((20, 20)))
        c = build_cyclopean(left, right, _uniform_disp((20, 20)), w)
        np.testing.assert_array_equal(c, left)

    def test_identity_fusion(self, rng):
        frame = rng.uniform(0, 255, (20, 20))
        w = ViewWeights(w_left=np.full((20, 20), 0.5),
                        w_right=np.full((20, 20), 0.5))
        c = build_cyclopean(frame, frame, _uniform_disp((20, 20)), w)
        np.testing.assert_allclose(c, frame, atol=1e-12)

    def test_midpoint_arithmetic(self):
        left = np.full((10, 10), 100.0)
        right = np.full((10, 10), 200.0)
        w = ViewWeights(w_left=np.full((10, 10), 0.5),
                        w_right=np.full((10, 10), 0.5))
        c = build_cyclopean(left, right, _uniform_disp((10, 10)), w)
        np.testing.assert_array_equal(c, 150.0)

    def test_convexity(self, rng):
        left = rng.uniform(0, 255, (20, 30))
        right = rng.uniform(0, 255, (20, 30))
        d = DisparityMap(d=rng.integers(-4, 5, (20, 30)).astype(np.int16),
                         max_disparity=4)
        wl = rng.uniform(0, 1, (20, 30))
        w = ViewWeights(w_left=wl, w_right=1.0 - wl)
        c = build_cyclopean(left, right, d, w)
        cols = np.clip(np.arange(30)[None, :] + d.d, 0, 29)
        shifted = np.take_along_axis(right, cols, axis=1)
        lo = np.minimum(left, shifted)
        hi = np.maximum(left, shifted)
        assert (c >= lo - 1e-12).all() and (c <= hi + 1e-12).all()


class TestPartitionPatches:
    def test_full_hd_has_144_blocks(self):
        grid = partition_patches(1920, 1080)
        assert grid.patch_count == 144

    def test_single_block(self):
        grid = partition_patches(120, 120)
        assert grid.origins == ((0, 0),)

    def test_margin_dropped(self):
        grid = partition_patches(239, 120)
        assert grid.patch_count == 1

    def test_too_small_frame(self):
        with pytest.raises(ValueError):
            partition_patches(100, 200)

    def test_tiling_disjoint_and_complete(self):
        grid = partition_patches(480, 272)
        cover = np.zeros((272, 480), dtype=int)
        for x0, y0 in grid.origins:
            cover[y0:y0 + 120, x0:x0 + 120] += 1
        assert cover.max() == 1
        assert cover.sum() == grid.patch_count * 120 * 120
