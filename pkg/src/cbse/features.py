"""Generalized Gaussian fitting of subband coefficients and feature assembly.

Each patch contributes one (alpha, beta) pair per subband via moment matching:
beta is the sample standard deviation and alpha inverts the standard moment
ratio by bisection. Rows of the feature matrix are
[alpha_1..alpha_135, beta_1..beta_135].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import steerable
from .cyclopean import PatchGrid

ALPHA_MIN = 0.05
ALPHA_MAX = 10.0
BISECT_TOL = 1e-6
MIN_SAMPLES = 100
DEGENERATE_ALPHA = 2.0
DEGENERATE_BETA = 1e-6


class DegenerateSubbandError(Exception):
    """Raised when a subband has zero variance and cannot be fitted."""


@dataclass(frozen=True)
class UGGDParams:
    """Shape (alpha) and spread (beta) of a fitted generalized Gaussian."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-patch feature rows; 270 columns = (alpha, beta) x 135 subbands."""

    values: np.ndarray
    source_tag: str = "distorted"
    degenerate_patches: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("feature matrix must be 2-D")


def moment_ratio(alpha: float | np.ndarray) -> float | np.ndarray:
    """r(alpha) = Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)), increasing in a."""
    a = np.asarray(alpha, dtype=np.float64)
    out = np.exp(2.0 * gammaln(2.0 / a) - gammaln(1.0 / a) - gammaln(3.0 / a))
    return float(out) if out.ndim == 0 else out


def fit_uggd(coefficients: np.ndarray) -> UGGDParams:
    """Moment-matching fit of a univariate generalized Gaussian."""
    x = np.asarray(coefficients, dtype=np.float64).ravel()
    if x.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    x = x - x.mean()
    beta = float(x.std(ddof=1))
    if not beta > 0.0:
        raise DegenerateSubbandError("zero-variance subband")
    rho = float(np.abs(x).mean()) ** 2 / float((x * x).mean())

    lo, hi = ALPHA_MIN, ALPHA_MAX
    if rho <= moment_ratio(lo):
        return UGGDParams(alpha=lo, beta=beta)
    if rho >= moment_ratio(hi):
        return UGGDParams(alpha=hi, beta=beta)
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if moment_ratio(mid) < rho:
            lo = mid
        else:
            hi = mid
    return UGGDParams(alpha=0.5 * (lo + hi), beta=beta)


def extract_features(cyclopean: np.ndarray, grid: PatchGrid,
                     orientations=None,
                     scales: int = steerable.NUM_SCALES,
                     sigma: float = steerable.DEFAULT_SIGMA,
                     order: int = steerable.DEFAULT_ORDER,
                     support: int = steerable.DEFAULT_SUPPORT,
                     source_tag: str = "distorted") -> FeatureMatrix:
    """Fit (alpha, beta) per subband for every patch of a cyclopean volume.

    `cyclopean` has shape (frames, height, width). Degenerate (flat) patches
    are retained with substituted parameters so the row count stays stable.
    """
    cyclopean = np.asarray(cyclopean, dtype=np.float64)
    if cyclopean.ndim != 3:
        raise ValueError("cyclopean volume must be (frames, height, width)")
    if orientations is None:
        orientations = steerable.make_orientations()
    n_sub = scales * len(orientations)

    rows = []
    degenerate = []
    for g, (x0, y0) in enumerate(grid.origins):
        column = cyclopean[:, y0:y0 + grid.block_h, x0:x0 + grid.block_w]
        patch = np.ascontiguousarray(np.moveaxis(column, 0, 2))
        alphas = np.empty(n_sub)
        betas = np.empty(n_sub)
        flat = False
        for idx, entry in enumerate(steerable.iter_subbands(
                patch, orientations, scales, sigma, order, support)):
            try:
                params = fit_uggd(entry.coefficients)
            except DegenerateSubbandError:
                params = UGGDParams(DEGENERATE_ALPHA, DEGENERATE_BETA)
                flat = True
            alphas[idx] = params.alpha
            betas[idx] = params.beta
        if flat:
            degenerate.append(g)
        rows.append(np.concatenate([alphas, betas]))

    if len(degenerate) == grid.patch_count:
        raise DegenerateSubbandError("every patch is degenerate")
    return FeatureMatrix(values=np.vstack(rows), source_tag=source_tag,
                         degenerate_patches=tuple(degenerate))


def save_features(features: FeatureMatrix, path) -> None:
    """Columnar text cache: header `rows cols source_tag`, then row-major data."""
    rows, cols = features.values.shape
    with open(path, "w") as fh:
        fh.write(f"{rows} {cols} {features.source_tag}\n")
        for row in features.values:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_features(path) -> FeatureMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("malformed feature file header")
        rows, cols, tag = int(header[0]), int(header[1]), header[2]
        values = np.loadtxt(fh, ndmin=2)
    if values.shape != (rows, cols):
        raise ValueError("feature file dimensions do not match header")
    return FeatureMatrix(values=values, source_tag=tag)
