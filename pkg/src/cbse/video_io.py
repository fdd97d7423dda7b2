"""Raw YUV 4:2:0 planar video decoding and the synthetic fog degrader.

Only the luma plane is kept; all downstream analysis operates on luminance.
Chroma planes are read and discarded.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class VideoIOError(Exception):
    """Raised when a raw video file cannot be decoded."""


@dataclass(frozen=True)
class FrameSequence:
    """Decoded luma volume, shape (frames, height, width), dtype uint8."""

    luma: np.ndarray

    def __post_init__(self):
        if self.luma.ndim != 3:
            raise ValueError("luma must be a (frames, height, width) volume")
        if self.luma.dtype != np.uint8:
            raise ValueError("luma samples must be uint8")
        if min(self.luma.shape) == 0:
            raise ValueError("empty luma volume")

    @property
    def frame_count(self) -> int:
        return self.luma.shape[0]

    @property
    def height(self) -> int:
        return self.luma.shape[1]

    @property
    def width(self) -> int:
        return self.luma.shape[2]

    def frames_float(self) -> np.ndarray:
        """Luma as float64 in [0, 255] for downstream math."""
        return self.luma.astype(np.float64)


@dataclass(frozen=True)
class StereoSequence:
    """A left/right pair of decoded views with matching geometry."""

    left: FrameSequence
    right: FrameSequence

    def __post_init__(self):
        if self.left.luma.shape != self.right.luma.shape:
            raise ValueError("left and right views must agree on dimensions "
                             "and frame count")


def read_yuv420(path: str | os.PathLike, width: int, height: int) -> FrameSequence:
    """Decode a raw planar YUV 4:2:0 8-bit file into its luma frames.

    The file holds frame-sequential Y, U, V planes; dimensions are supplied by
    the caller since raw files carry no header.
    """
    if width <= 0 or height <= 0:
        raise VideoIOError("width and height must be positive")
    if width % 2 or height % 2:
        raise VideoIOError("YUV 4:2:0 requires even width and height")
    if not os.path.exists(path):
        raise VideoIOError(f"file not found: {path}")
    stride = width * height * 3 // 2
    size = os.path.getsize(path)
    if size == 0 or size < stride:
        raise VideoIOError(f"{path}: no complete frame ({size} bytes, "
                           f"frame stride {stride})")
    if size % stride:
        raise VideoIOError(f"{path}: truncated frame (size {size} is not a "
                           f"multiple of frame stride {stride})")
    raw = np.fromfile(path, dtype=np.uint8)
    frames = size // stride
    luma = raw.reshape(frames, stride)[:, : width * height]
    return FrameSequence(luma.reshape(frames, height, width).copy())


def write_yuv420(seq: FrameSequence, path: str | os.PathLike) -> None:
    """Serialize a luma sequence as YUV 4:2:0 with neutral (128) chroma."""
    w, h = seq.width, seq.height
    chroma = np.full((w // 2) * (h // 2) * 2, 128, dtype=np.uint8)
    with open(path, "wb") as fh:
        for frame in seq.luma:
            fh.write(frame.tobytes())
            fh.write(chroma.tobytes())


def apply_synthetic_fog(seq: FrameSequence, t: float) -> FrameSequence:
    """Blend every sample toward white: s -> round((1-t)*s + t*255).

    Test-only stand-in for atmospheric fog; monotone in t.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"blend factor must be in [0, 1], got {t}")
    blended = (1.0 - t) * seq.luma.astype(np.float64) + t * 255.0
    fogged = np.floor(blended + 0.5).astype(np.uint8)
    return FrameSequence(fogged)
