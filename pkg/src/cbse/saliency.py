"""Graph-based visual saliency on luminance-contrast channels.

Multi-scale local contrast maps feed a fully connected Markov chain on a
coarse lattice; the chain's stationary distribution is the activation. The
final map is the across-scale sum, upsampled to full resolution and
normalized to unit mass.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import cv2
import numpy as np
from scipy.ndimage import correlate1d

LATTICE_STRIDE = 8
CONTRAST_SCALES = (2, 4, 8)
MAD_WINDOW = 3
SIGMA_DIAG_FRACTION = 1.0 / 6.0
POWER_TOL = 1e-8
POWER_CAP = 10000
MIN_SIZE = 32


class SaliencyError(Exception):
    """Raised for inputs the saliency model cannot process."""


@dataclass(frozen=True)
class SaliencyMap:
    """Non-negative saliency plane normalized to unit sum."""

    s: np.ndarray
    degenerate: bool = False
    # Per-channel stationary vectors, kept for warm-starting the next frame.
    channel_states: tuple | None = field(default=None, repr=False, compare=False)


def _block_mean(plane: np.ndarray, factor: int) -> np.ndarray:
    h, w = plane.shape
    h -= h % factor
    w -= w % factor
    blocks = plane[:h, :w].reshape(h // factor, factor, w // factor, factor)
    # factor is a power of two, so the division is exact for integer sums.
    return blocks.sum(axis=(1, 3)) / float(factor * factor)


def _local_mad(plane: np.ndarray, window: int = MAD_WINDOW) -> np.ndarray:
    # Sum-only formulation: a global offset cancels exactly in n*x - boxsum(x)
    # before any inexact division, giving exact offset invariance.
    n = window * window
    ones = np.ones(window)
    box = correlate1d(correlate1d(plane, ones, axis=0, mode="reflect"),
                      ones, axis=1, mode="reflect")
    dev = np.abs(n * plane - box)
    mad = correlate1d(correlate1d(dev, ones, axis=0, mode="reflect"),
                      ones, axis=1, mode="reflect")
    return mad / float(n * n)


def _contrast_channels(luma: np.ndarray, lattice_hw: tuple[int, int]) -> list[np.ndarray]:
    lh, lw = lattice_hw
    channels = []
    for factor in CONTRAST_SCALES:
        down = _block_mean(luma, factor)
        feat = _local_mad(down)
        channels.append(cv2.resize(feat, (lw, lh), interpolation=cv2.INTER_LINEAR))
    return channels


@lru_cache(maxsize=8)
def _distance_decay(shape: tuple[int, int]) -> np.ndarray:
    lh, lw = shape
    ys, xs = np.unravel_index(np.arange(lh * lw), (lh, lw))
    dy = ys[:, None] - ys[None, :]
    dx = xs[:, None] - xs[None, :]
    sigma = np.hypot(lh, lw) * SIGMA_DIAG_FRACTION
    return np.exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma))


def stationary_distribution(transition: np.ndarray,
                            init: np.ndarray | None = None,
                            tol: float = POWER_TOL,
                            cap: int = POWER_CAP) -> np.ndarray:
    """Power iteration for the stationary row vector of a Markov matrix."""
    n = transition.shape[0]
    v = np.full(n, 1.0 / n) if init is None else init / init.sum()
    for _ in range(cap):
        nxt = v @ transition
        err = np.abs(nxt - v).sum()
        v = nxt / nxt.sum()
        if err < tol:
            return v
    raise SaliencyError("power iteration failed to converge")


def _channel_activation(feature: np.ndarray,
                        init: np.ndarray | None) -> np.ndarray | None:
    flat = feature.ravel()
    if flat.max() == flat.min():
        return None
    weights = np.abs(flat[:, None] - flat[None, :]) * _distance_decay(feature.shape)
    weights /= weights.sum(axis=1, keepdims=True)
    return stationary_distribution(weights, init=init)


def compute_saliency(luma: np.ndarray,
                     warm: SaliencyMap | None = None) -> SaliencyMap:
    """Saliency of a luma plane; at least 32x32 pixels required.

    `warm` optionally supplies the previous frame's map whose per-channel
    stationary vectors seed the power iteration (same fixed point, fewer
    iterations on slowly varying video).
    """
    luma = np.asarray(luma, dtype=np.float64)
    if luma.ndim != 2:
        raise SaliencyError("luma plane must be 2-D")
    h, w = luma.shape
    if h < MIN_SIZE or w < MIN_SIZE:
        raise SaliencyError(f"plane too small for saliency ({h}x{w})")
    lattice = (h // LATTICE_STRIDE, w // LATTICE_STRIDE)

    channels = _contrast_channels(luma, lattice)
    states = warm.channel_states if warm is not None else None
    uniform_node = 1.0 / (lattice[0] * lattice[1])
    activation = np.zeros(lattice)
    new_states: list[np.ndarray | None] = []
    any_active = False
    try:
        for k, feat in enumerate(channels):
            init = states[k] if states is not None else None
            stat = _channel_activation(feat, init)
            new_states.append(stat)
            if stat is None:
                activation += uniform_node
            else:
                activation += stat.reshape(lattice)
                any_active = True
    except SaliencyError:
        uniform = np.full((h, w), 1.0 / (h * w))
        return SaliencyMap(s=uniform, degenerate=True)

    if not any_active:
        uniform = np.full((h, w), 1.0 / (h * w))
        return SaliencyMap(s=uniform, degenerate=True)

    full = cv2.resize(activation, (w, h), interpolation=cv2.INTER_LINEAR)
    np.clip(full, 0.0, None, out=full)
    total = full.sum()
    if total <= 0.0:
        uniform = np.full((h, w), 1.0 / (h * w))
        return SaliencyMap(s=uniform, degenerate=True)
    return SaliencyMap(s=full / total, degenerate=False,
                       channel_states=tuple(new_states))
