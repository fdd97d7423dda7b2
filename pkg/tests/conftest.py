import numpy as np
import pytest
from scipy.ndimage import gaussian_filter
from scipy.special import gamma as gamma_fn

from cbse.video_io import FrameSequence, StereoSequence


def smooth_texture(height, width, seed, blur=6.0, lo=30.0, hi=220.0):
    """Band-limited random texture in [lo, hi], uint8."""
    rng = np.random.default_rng(seed)
    plane = gaussian_filter(rng.standard_normal((height, width)), blur)
    plane = (plane - plane.min()) / np.ptp(plane)
    return (plane * (hi - lo) + lo).astype(np.uint8)


def textured_clip(frames, height, width, seed, blur=6.0):
    """Moving textured luma volume (simple horizontal drift)."""
    base = smooth_texture(height, width, seed, blur=blur)
    vol = np.stack([np.roll(base, t, axis=1) for t in range(frames)])
    rng = np.random.default_rng(seed + 1)
    noise = rng.integers(-3, 4, size=vol.shape)
    return np.clip(vol.astype(np.int16) + noise, 0, 255).astype(np.uint8)


def stereo_clip(frames, height, width, seed, shift=4):
    """Stereo pair: right view is the left view translated horizontally."""
    left = textured_clip(frames, height, width, seed)
    right = np.roll(left, -shift, axis=2)
    return StereoSequence(left=FrameSequence(left),
                          right=FrameSequence(right))


def ggd_samples(alpha, beta, n, rng):
    """Generalized Gaussian samples with shape alpha and std beta."""
    g = rng.gamma(shape=1.0 / alpha, scale=1.0, size=n)
    magnitude = g ** (1.0 / alpha)
    signs = rng.choice([-1.0, 1.0], size=n)
    scale = beta * np.sqrt(gamma_fn(1.0 / alpha) / gamma_fn(3.0 / alpha))
    return signs * magnitude * scale


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
