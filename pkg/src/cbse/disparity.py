"""SSIM-based block-matching horizontal disparity estimation.

For each pixel the disparity is the horizontal shift of the right view that
maximizes windowed SSIM against the left view. Ties break toward the smallest
shift magnitude, then toward the negative shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_L = 255.0
DEFAULT_WINDOW = 11
DEFAULT_MAX_DISPARITY = 64


@dataclass(frozen=True)
class DisparityMap:
    """Signed integer horizontal disparities, shape (height, width)."""

    d: np.ndarray
    max_disparity: int

    def __post_init__(self):
        if self.d.ndim != 2:
            raise ValueError("disparity plane must be 2-D")
        if np.abs(self.d).max(initial=0) > self.max_disparity:
            raise ValueError("disparity exceeds the search range")


def _box(plane: np.ndarray, window: int) -> np.ndarray:
    return uniform_filter(plane, size=window, mode="reflect")


def compute_disparity(left: np.ndarray, right: np.ndarray,
                      max_disparity: int = DEFAULT_MAX_DISPARITY,
                      window: int = DEFAULT_WINDOW) -> DisparityMap:
    """Per-pixel disparity d such that right(x+d, y) matches left(x, y).

    Window statistics use uniform (box) weighting with symmetric padding.
    """
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape:
        raise ValueError("left and right planes must have the same shape")
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    h, w = left.shape
    if window > h or window > w:
        raise ValueError("window exceeds plane dimensions")
    if max_disparity < 0:
        raise ValueError("max_disparity must be non-negative")

    c1 = (SSIM_K1 * SSIM_L) ** 2
    c2 = (SSIM_K2 * SSIM_L) ** 2

    mu_l = _box(left, window)
    var_l = _box(left * left, window) - mu_l * mu_l

    xs = np.arange(w)
    best = np.full((h, w), -np.inf)
    d = np.zeros((h, w), dtype=np.int16)

    # Candidate order realizes the tie-break: |s| ascending, negative first.
    shifts = sorted(range(-max_disparity, max_disparity + 1),
                    key=lambda s: (abs(s), s))
    for s in shifts:
        cols = np.clip(xs + s, 0, w - 1)
        shifted = right[:, cols]
        mu_r = _box(shifted, window)
        var_r = _box(shifted * shifted, window) - mu_r * mu_r
        cov = _box(left * shifted, window) - mu_l * mu_r
        ssim = ((2.0 * mu_l * mu_r + c1) * (2.0 * cov + c2)) / (
            (mu_l * mu_l + mu_r * mu_r + c1) * (var_l + var_r + c2))
        better = ssim > best
        best[better] = ssim[better]
        d[better] = s
    return DisparityMap(d=d, max_disparity=max_disparity)
