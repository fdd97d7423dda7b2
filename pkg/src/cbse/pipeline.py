"""End-to-end orchestration: stereo video -> cyclopean volume -> features -> score."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import steerable
from .cyclopean import (DEFAULT_BLOCK, DEFAULT_RMS_WINDOW, build_cyclopean,
                        compute_weights, partition_patches)
from .disparity import DEFAULT_MAX_DISPARITY, DEFAULT_WINDOW, compute_disparity
from .features import FeatureMatrix, extract_features
from .quality import MVGModel, QualityScore, check_params, fit_mvg, pool_score
from .saliency import compute_saliency
from .video_io import StereoSequence


@dataclass(frozen=True)
class PipelineConfig:
    """All tunable pipeline parameters; defaults follow the module contracts."""

    block_w: int = DEFAULT_BLOCK
    block_h: int = DEFAULT_BLOCK
    sigma: float = steerable.DEFAULT_SIGMA
    order: int = steerable.DEFAULT_ORDER
    support: int = steerable.DEFAULT_SUPPORT
    scales: int = steerable.NUM_SCALES
    max_disparity: int = DEFAULT_MAX_DISPARITY
    ssim_window: int = DEFAULT_WINDOW
    rms_window: int = DEFAULT_RMS_WINDOW
    threads: int = 1

    def to_params(self) -> dict[str, str]:
        """Canonical string form persisted in model files; threads excluded."""
        out = {f.name: repr(getattr(self, f.name)) for f in fields(self)
               if f.name != "threads"}
        out["theta"] = ",".join(str(t) for t in steerable.THETA_DEGREES)
        out["phi"] = ",".join(str(p) for p in steerable.PHI_DEGREES)
        return out

    @classmethod
    def from_json(cls, path, threads: int | None = None) -> "PipelineConfig":
        with open(path) as fh:
            overrides = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**overrides)
        if threads is not None:
            cfg = replace(cfg, threads=threads)
        return cfg


def cyclopean_volume(stereo: StereoSequence,
                     config: PipelineConfig = PipelineConfig()) -> np.ndarray:
    """Fuse every frame pair into a (frames, height, width) cyclopean volume."""
    left = stereo.left.frames_float()
    right = stereo.right.frames_float()
    frames = np.empty_like(left)
    sal_l = sal_r = None
    for i in range(left.shape[0]):
        disp = compute_disparity(left[i], right[i],
                                 max_disparity=config.max_disparity,
                                 window=config.ssim_window)
        sal_l = compute_saliency(left[i], warm=sal_l)
        sal_r = compute_saliency(right[i], warm=sal_r)
        weights = compute_weights(sal_l, sal_r, disp, window=config.rms_window)
        frames[i] = build_cyclopean(left[i], right[i], disp, weights)
    return frames


def video_features(stereo: StereoSequence,
                   config: PipelineConfig = PipelineConfig(),
                   source_tag: str = "distorted") -> FeatureMatrix:
    """Feature matrix of one stereo video (one row per patch)."""
    volume = cyclopean_volume(stereo, config)
    grid = partition_patches(stereo.left.width, stereo.left.height,
                             block_w=config.block_w, block_h=config.block_h)
    return extract_features(volume, grid, scales=config.scales,
                            sigma=config.sigma, order=config.order,
                            support=config.support, source_tag=source_tag)


def build_pristine_model(corpus: list[StereoSequence],
                         config: PipelineConfig = PipelineConfig()) -> MVGModel:
    """Fit one population model over the stacked features of a pristine corpus."""
    if not corpus:
        raise ValueError("empty pristine corpus")
    if config.threads > 1 and len(corpus) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            mats = list(pool.map(
                lambda s: video_features(s, config, source_tag="pristine"),
                corpus))
    else:
        mats = [video_features(s, config, source_tag="pristine")
                for s in corpus]
    stacked = np.vstack([m.values for m in mats])
    return fit_mvg(stacked, params=config.to_params())


def score_video(stereo: StereoSequence, pristine: MVGModel,
                config: PipelineConfig = PipelineConfig()) -> QualityScore:
    """Score one test video against a pristine population model."""
    check_params(pristine, config.to_params())
    features = video_features(stereo, config, source_tag="distorted")
    test_model = fit_mvg(features.values, params=config.to_params())
    return pool_score(pristine, test_model)
