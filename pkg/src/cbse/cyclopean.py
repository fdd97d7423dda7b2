"""Cyclopean frame fusion and spatiotemporal patch partitioning.

Left/right frames are fused with weights derived from the ratio of windowed
saliency RMS values, with the right-view window taken at the
disparity-compensated column.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .disparity import DisparityMap
from .saliency import SaliencyMap

DEFAULT_RMS_WINDOW = 17
DEFAULT_BLOCK = 120


@dataclass(frozen=True)
class ViewWeights:
    """Complementary per-pixel fusion weights, w_left + w_right == 1."""

    w_left: np.ndarray
    w_right: np.ndarray


@dataclass(frozen=True)
class PatchGrid:
    """Nonoverlapping block tiling of a frame; blocks span all frames."""

    block_w: int
    block_h: int
    origins: tuple[tuple[int, int], ...]

    @property
    def patch_count(self) -> int:
        return len(self.origins)


def _windowed_rms(plane: np.ndarray, window: int) -> np.ndarray:
    mean_sq = uniform_filter(plane * plane, size=window, mode="reflect")
    return np.sqrt(np.clip(mean_sq, 0.0, None))


def compute_weights(sal_left: SaliencyMap, sal_right: SaliencyMap,
                    disp: DisparityMap,
                    window: int = DEFAULT_RMS_WINDOW) -> ViewWeights:
    """Fusion weights from windowed saliency RMS of each view.

    The right-view RMS window is centered at the disparity-shifted column
    (x + d, y). Where both windows are empty the weights default to 0.5.
    """
    sl = sal_left.s
    sr = sal_right.s
    if sl.shape != sr.shape or sl.shape != disp.d.shape:
        raise ValueError("saliency maps and disparity must share dimensions")
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and positive")
    h, w = sl.shape
    rms_l = _windowed_rms(sl, window)
    rms_r_plane = _windowed_rms(sr, window)
    xs = np.arange(w)[None, :]
    cols = np.clip(xs + disp.d, 0, w - 1)
    rms_r = np.take_along_axis(rms_r_plane, cols, axis=1)
    denom = rms_l + rms_r
    w_left = np.where(denom > 0.0, np.divide(rms_l, denom,
                                             out=np.full((h, w), 0.5),
                                             where=denom > 0.0), 0.5)
    return ViewWeights(w_left=w_left, w_right=1.0 - w_left)


def build_cyclopean(left: np.ndarray, right: np.ndarray,
                    disp: DisparityMap, weights: ViewWeights) -> np.ndarray:
    """Fused frame C = W_L * I_L + W_R * I_R(x+d, y); x+d clamps to the edge."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape or left.shape != disp.d.shape:
        raise ValueError("frames and disparity must share dimensions")
    h, w = left.shape
    xs = np.arange(w)[None, :]
    cols = np.clip(xs + disp.d, 0, w - 1)
    right_shifted = np.take_along_axis(right, cols, axis=1)
    return weights.w_left * left + weights.w_right * right_shifted


def partition_patches(width: int, height: int,
                      block_w: int = DEFAULT_BLOCK,
                      block_h: int = DEFAULT_BLOCK) -> PatchGrid:
    """Tile the top-left region with nonoverlapping blocks; margins dropped."""
    if block_w <= 0 or block_h <= 0:
        raise ValueError("block dimensions must be positive")
    if width < block_w or height < block_h:
        raise ValueError(f"frame {width}x{height} smaller than one "
                         f"{block_w}x{block_h} block")
    origins = tuple((x0, y0)
                    for y0 in range(0, height - block_h + 1, block_h)
                    for x0 in range(0, width - block_w + 1, block_w))
    return PatchGrid(block_w=block_w, block_h=block_h, origins=origins)
