import numpy as np
import pytest

from cbse.saliency import (SaliencyError, compute_saliency,
                           stationary_distribution)
from conftest import smooth_texture


class TestComputeSaliency:
    def test_constant_plane_uniform(self):
        plane = np.full((40, 48), 77, dtype=np.uint8)
        sal = compute_saliency(plane)
        assert sal.degenerate
        np.testing.assert_allclose(sal.s, 1.0 / (40 * 48))
        assert abs(sal.s.sum() - 1.0) < 1e-9

    def test_bright_square_attracts_argmax(self):
        plane = np.full((96, 96), 40.0)
        plane[36:60, 36:60] = 220.0
        sal = compute_saliency(plane)
        y, x = np.unravel_index(sal.s.argmax(), sal.s.shape)
        assert 28 <= y < 68 and 28 <= x < 68

    def test_unit_sum(self):
        plane = smooth_texture(64, 80, seed=5)
        sal = compute_saliency(plane)
        assert abs(sal.s.sum() - 1.0) < 1e-9
        assert (sal.s >= 0).all()

    def test_offset_invariance_exact(self):
        plane = smooth_texture(64, 64, seed=6, lo=20, hi=180).astype(np.float64)
        a = compute_saliency(plane)
        b = compute_saliency(plane + 30.0)
        np.testing.assert_array_equal(a.s, b.s)

    def test_too_small_plane(self):
        with pytest.raises(SaliencyError):
            compute_saliency(np.zeros((16, 16)))

    def test_warm_start_same_fixed_point(self):
        plane = smooth_texture(64, 64, seed=8)
        cold = compute_saliency(plane)
        warm = compute_saliency(plane, warm=cold)
        np.testing.assert_allclose(warm.s, cold.s, atol=1e-6)


class TestStationaryDistribution:
    def test_residual_below_tolerance(self, rng):
        n = 50
        w = rng.uniform(0.1, 1.0, (n, n))
        p = w / w.sum(axis=1, keepdims=True)
        v = stationary_distribution(p)
        assert np.abs(v @ p - v).sum() < 1e-8
        assert abs(v.sum() - 1.0) < 1e-12

    def test_two_state_chain_closed_form(self):
        # stationary of [[1-a, a], [b, 1-b]] is (b, a)/(a+b)
        a, b = 0.3, 0.1
        p = np.array([[1 - a, a], [b, 1 - b]])
        v = stationary_distribution(p)
        np.testing.assert_allclose(v, [b / (a + b), a / (a + b)], atol=1e-7)
