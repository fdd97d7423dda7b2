"""Objective-score evaluation: logistic mapping, correlations, F-test.

Objective scores are passed through a 4-parameter logistic before computing
LCC and RMSE; SROCC is computed on the raw scores. Pairs of algorithms are
compared by an F-test on their post-fit residual variances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

MAX_ITER = 500
SSE_RTOL = 1e-10
EXP_CLIP = 500.0


class EvaluationError(Exception):
    """Raised for degenerate evaluation inputs."""


@dataclass(frozen=True)
class MetricsReport:
    lcc: float
    srocc: float
    rmse: float
    logistic: tuple[float, float, float, float]
    residuals: np.ndarray


def logistic(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """f(x) = (z1 - z2) / (1 + exp((x - z3)/|z4|)) + z2."""
    z1, z2, z3, z4 = params
    arg = np.clip((x - z3) / abs(z4), -EXP_CLIP, EXP_CLIP)
    return (z1 - z2) / (1.0 + np.exp(arg)) + z2


def _jacobian(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    z1, z2, z3, z4 = params
    arg = np.clip((x - z3) / abs(z4), -EXP_CLIP, EXP_CLIP)
    e = np.exp(arg)
    s = 1.0 / (1.0 + e)
    ds = e * s * s  # -d s / d arg
    jac = np.empty((x.size, 4))
    jac[:, 0] = s
    jac[:, 1] = 1.0 - s
    jac[:, 2] = (z1 - z2) * ds / abs(z4)
    jac[:, 3] = (z1 - z2) * ds * (x - z3) * np.sign(z4) / (z4 * z4)
    return jac


def _levenberg_marquardt(x: np.ndarray, y: np.ndarray,
                         init: np.ndarray) -> tuple[np.ndarray, float]:
    params = init.astype(np.float64).copy()
    if params[3] == 0.0:
        params[3] = 1.0
    sse = float(((y - logistic(params, x)) ** 2).sum())
    lam = 1e-3
    for _ in range(MAX_ITER):
        jac = _jacobian(params, x)
        resid = y - logistic(params, x)
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        improved = False
        for _ in range(30):
            damped = jtj + lam * np.diag(np.clip(np.diag(jtj), 1e-12, None))
            try:
                step = np.linalg.solve(damped, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = params + step
            if trial[3] == 0.0:
                trial[3] = 1e-12
            trial_sse = float(((y - logistic(trial, x)) ** 2).sum())
            if trial_sse < sse:
                rel = (sse - trial_sse) / max(sse, 1e-300)
                params, sse = trial, trial_sse
                lam = max(lam / 3.0, 1e-12)
                improved = True
                if rel < SSE_RTOL:
                    return params, sse
                break
            lam *= 10.0
        if not improved:
            return params, sse
    return params, sse


def logistic_fit(scores: np.ndarray, subjective: np.ndarray
                 ) -> tuple[tuple[float, float, float, float], np.ndarray]:
    """Least-squares logistic regression of subjective onto objective scores.

    Both monotone orientations are tried from data-driven initial values and
    the lower-SSE solution wins.
    """
    x = np.asarray(scores, dtype=np.float64)
    y = np.asarray(subjective, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 5:
        raise EvaluationError("need equal-length 1-D inputs with >= 5 points")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise EvaluationError("non-finite inputs")
    if x.max() == x.min():
        raise EvaluationError("objective scores are constant")
    if y.max() == y.min():
        c = float(y[0])
        params = (c, c, float(np.median(x)), max(float(x.std()), 1.0))
        return params, np.full_like(x, c)

    z3 = float(np.median(x))
    z4 = max(float(x.std()), 1e-6)
    hi, lo = float(y.max()), float(y.min())
    best = None
    for init in (np.array([hi, lo, z3, z4]), np.array([lo, hi, z3, z4])):
        params, sse = _levenberg_marquardt(x, y, init)
        if best is None or sse < best[1]:
            best = (params, sse)
    params = best[0]
    return tuple(float(p) for p in params), logistic(params, x)


def correlations(fitted: np.ndarray, subjective: np.ndarray,
                 raw_scores: np.ndarray,
                 logistic_params: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0),
                 ) -> MetricsReport:
    """LCC on fitted values, SROCC on raw scores, RMSE of fit residuals."""
    fitted = np.asarray(fitted, dtype=np.float64)
    subjective = np.asarray(subjective, dtype=np.float64)
    raw_scores = np.asarray(raw_scores, dtype=np.float64)
    if not (fitted.shape == subjective.shape == raw_scores.shape) \
            or fitted.ndim != 1 or fitted.size < 3:
        raise EvaluationError("need equal-length 1-D inputs with >= 3 points")
    residuals = subjective - fitted
    rmse = float(np.sqrt((residuals ** 2).mean()))
    if subjective.std() == 0.0 or raw_scores.std() == 0.0:
        raise EvaluationError("zero-variance input to correlation")
    if fitted.std() == 0.0:
        lcc = 0.0
    else:
        lcc = float(np.corrcoef(fitted, subjective)[0, 1])
    srocc = float(stats.spearmanr(raw_scores, subjective).statistic)
    return MetricsReport(lcc=lcc, srocc=srocc, rmse=rmse,
                         logistic=logistic_params, residuals=residuals)


def evaluate_scores(raw_scores: np.ndarray,
                    subjective: np.ndarray) -> MetricsReport:
    """Convenience wrapper: logistic fit followed by the correlation report."""
    params, fitted = logistic_fit(raw_scores, subjective)
    return correlations(fitted, subjective, raw_scores, logistic_params=params)


def f_test(residuals_a: np.ndarray, residuals_b: np.ndarray,
           alpha: float = 0.05) -> str:
    """Two-sided residual-variance F-test.

    Returns 'A_better', 'B_better' or 'indistinguishable' at the given
    significance level; lower residual variance is better.
    """
    a = np.asarray(residuals_a, dtype=np.float64)
    b = np.asarray(residuals_b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size or a.size < 10:
        raise EvaluationError("need equal-length residual vectors with >= 10 "
                              "points")
    var_a = a.var(ddof=1)
    var_b = b.var(ddof=1)
    if var_a == 0.0 or var_b == 0.0:
        raise EvaluationError("zero variance in a residual set")
    f = var_a / var_b
    lo = stats.f.ppf(alpha / 2.0, a.size - 1, b.size - 1)
    hi = stats.f.ppf(1.0 - alpha / 2.0, a.size - 1, b.size - 1)
    if f > hi:
        return "B_better"
    if f < lo:
        return "A_better"
    return "indistinguishable"


def parse_scores(path) -> dict[str, float]:
    """Read a `video,score` delimited file."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")][:2] != \
            ["video", "score"]:
        raise EvaluationError("line 1: missing `video,score` header")
    out = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [c.strip() for c in line.split(",")]
        if len(parts) != 2:
            raise EvaluationError(f"line {lineno}: expected `video,score`")
        try:
            out[parts[0]] = float(parts[1])
        except ValueError:
            raise EvaluationError(f"line {lineno}: non-numeric score "
                                  f"{parts[1]!r}")
    return out
