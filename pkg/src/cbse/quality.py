"""Multivariate Gaussian population models and the pooled quality score.

The pristine and test feature populations are summarized by mean vector and
shrinkage-regularized covariance. The two pooled distances are elementwise
product -> sqrt -> sum -> log, over mean entries and covariance entries
respectively; the final score is their product.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

SHRINKAGE_FACTOR = 1e-6
COV_EPSILON = 1e-12
MODEL_MAGIC = "CBSE-MODEL"
MODEL_VERSION = 1


class ModelFormatError(Exception):
    """Raised when a persisted model file cannot be parsed."""


class ConfigMismatchError(Exception):
    """Raised when a model was built with different pipeline parameters."""


@dataclass(frozen=True)
class MVGModel:
    """Mean vector and shrinkage-regularized covariance of a feature set."""

    mu: np.ndarray
    sigma: np.ndarray
    sample_count: int
    shrinkage_lambda: float
    params: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        n = self.mu.shape[0]
        if self.sigma.shape != (n, n):
            raise ValueError("covariance shape does not match mean vector")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-9):
            raise ValueError("covariance must be symmetric")


@dataclass(frozen=True)
class QualityScore:
    """Pooled distances and their product, the overall score."""

    s_mu: float
    s_sigma: float
    cbse: float

    @classmethod
    def from_distances(cls, s_mu: float, s_sigma: float) -> "QualityScore":
        return cls(s_mu=s_mu, s_sigma=s_sigma, cbse=s_mu * s_sigma)


def fit_mvg(features: np.ndarray, params: dict[str, str] | None = None) -> MVGModel:
    """Column means plus sample covariance with lambda*I shrinkage."""
    values = np.asarray(features, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] < 2:
        raise ValueError("need a 2-D feature matrix with at least 2 rows")
    n, cols = values.shape
    mu = values.mean(axis=0)
    sample_cov = np.cov(values, rowvar=False, ddof=1)
    sample_cov = np.atleast_2d(sample_cov)
    lam = SHRINKAGE_FACTOR * np.trace(sample_cov) / cols
    if lam == 0.0:
        logger.warning("degenerate feature population: zero-trace covariance")
    sigma = sample_cov + lam * np.eye(cols)
    return MVGModel(mu=mu, sigma=sigma, sample_count=n, shrinkage_lambda=lam,
                    params=dict(params or {}))


def bhattacharyya_mean(mu_p: np.ndarray, mu_d: np.ndarray) -> float:
    """log of the summed elementwise sqrt-product of two positive vectors."""
    mu_p = np.asarray(mu_p, dtype=np.float64)
    mu_d = np.asarray(mu_d, dtype=np.float64)
    if mu_p.shape != mu_d.shape or mu_p.ndim != 1:
        raise ValueError("mean vectors must be 1-D with equal length")
    if (mu_p <= 0).any() or (mu_d <= 0).any():
        raise ValueError("mean vectors must be strictly positive")
    return float(np.log(np.sqrt(mu_p * mu_d).sum()))


def bhattacharyya_cov(sigma_p: np.ndarray, sigma_d: np.ndarray) -> float:
    """Covariance analogue over all matrix entries; negative products clamp to 0."""
    sigma_p = np.asarray(sigma_p, dtype=np.float64)
    sigma_d = np.asarray(sigma_d, dtype=np.float64)
    if sigma_p.shape != sigma_d.shape or sigma_p.ndim != 2:
        raise ValueError("covariance matrices must be 2-D with equal shape")
    total = np.sqrt(np.clip(sigma_p * sigma_d, 0.0, None)).sum()
    if total == 0.0:
        logger.warning("all covariance products vanished; using epsilon floor")
        total = COV_EPSILON
    return float(np.log(total))


def pool_score(pristine: MVGModel, test: MVGModel) -> QualityScore:
    """Distances between two population models pooled into the final score."""
    s_mu = bhattacharyya_mean(pristine.mu, test.mu)
    s_sigma = bhattacharyya_cov(pristine.sigma, test.sigma)
    return QualityScore.from_distances(s_mu, s_sigma)


def save_model(model: MVGModel, path) -> None:
    """Persist a model as versioned human-readable text."""
    n = model.mu.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{MODEL_MAGIC} {MODEL_VERSION}\n")
        fh.write(f"features {n}\n")
        fh.write(f"samples {model.sample_count}\n")
        fh.write(f"shrinkage_lambda {model.shrinkage_lambda:.17g}\n")
        for key in sorted(model.params):
            fh.write(f"param {key} {model.params[key]}\n")
        fh.write("mu\n")
        fh.write(" ".join(f"{v:.17g}" for v in model.mu) + "\n")
        fh.write("sigma\n")
        for row in model.sigma:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_model(path) -> MVGModel:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split() != [MODEL_MAGIC, str(MODEL_VERSION)]:
        raise ModelFormatError(f"{path}: not a version-{MODEL_VERSION} model file")
    params: dict[str, str] = {}
    n = samples = None
    lam = None
    i = 1
    while i < len(lines) and lines[i] != "mu":
        key, _, rest = lines[i].partition(" ")
        if key == "features":
            n = int(rest)
        elif key == "samples":
            samples = int(rest)
        elif key == "shrinkage_lambda":
            lam = float(rest)
        elif key == "param":
            pkey, _, pval = rest.partition(" ")
            params[pkey] = pval
        else:
            raise ModelFormatError(f"{path}: unexpected header line {lines[i]!r}")
        i += 1
    if n is None or samples is None or lam is None or i >= len(lines):
        raise ModelFormatError(f"{path}: incomplete header")
    mu = np.fromiter(map(float, lines[i + 1].split()), dtype=np.float64)
    if mu.shape != (n,) or lines[i + 2] != "sigma":
        raise ModelFormatError(f"{path}: malformed mean vector block")
    sigma_lines = lines[i + 3:i + 3 + n]
    if len(sigma_lines) != n:
        raise ModelFormatError(f"{path}: malformed covariance block")
    sigma = np.array([np.fromiter(map(float, row.split()), dtype=np.float64)
                      for row in sigma_lines])
    if sigma.shape != (n, n):
        raise ModelFormatError(f"{path}: malformed covariance block")
    return MVGModel(mu=mu, sigma=sigma, sample_count=samples,
                    shrinkage_lambda=lam, params=params)


def check_params(model: MVGModel, params: dict[str, str]) -> None:
    """Refuse to score against a model built with different parameters."""
    if model.params != params:
        diff = {k for k in set(model.params) | set(params)
                if model.params.get(k) != params.get(k)}
        raise ConfigMismatchError(
            "model pipeline parameters differ from current configuration: "
            + ", ".join(sorted(diff)))
