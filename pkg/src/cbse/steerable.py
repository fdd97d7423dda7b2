"""Spherical steerable filter bank over spatiotemporal volumes.

Kernels are oriented Gaussian-windowed Hermite polynomials evaluated along a
direction given by spherical angles (theta, phi): a Gaussian times H_M of the
signed distance along the axis, DC-removed and L2-normalized. Decomposition
runs at three spatial scales over the fixed 9x5 orientation grid, yielding the
135-subband layout.

The convolution path expands the polynomial into monomials so every basis
kernel is separable; oriented responses are linear combinations of the basis
responses, which keeps the per-patch cost low without changing the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from numpy.polynomial import hermite as nph
from scipy.ndimage import correlate1d, gaussian_filter1d

THETA_DEGREES = (0, 45, 90, 135, 180, 225, 270, 315, 360)
PHI_DEGREES = (-90, -45, 0, 45, 90)
DEFAULT_SIGMA = 1.5
DEFAULT_ORDER = 2
DEFAULT_SUPPORT = 9
NUM_SCALES = 3
PYRAMID_BLUR_SIGMA = 1.0

_SQRT_HALF = math.sqrt(0.5)
_EXACT_SINCOS = {
    0: (0.0, 1.0), 45: (_SQRT_HALF, _SQRT_HALF), 90: (1.0, 0.0),
    135: (_SQRT_HALF, -_SQRT_HALF), 180: (0.0, -1.0),
    225: (-_SQRT_HALF, -_SQRT_HALF), 270: (-1.0, 0.0),
    315: (-_SQRT_HALF, _SQRT_HALF),
}


def _sincos_deg(angle: float) -> tuple[float, float]:
    # Exact values at multiples of 45 degrees keep redundant orientations
    # (theta 0 vs 360, any theta at phi 0) bit-identical.
    key = angle % 360
    if key in _EXACT_SINCOS:
        return _EXACT_SINCOS[key]
    rad = math.radians(angle)
    return math.sin(rad), math.cos(rad)


@dataclass(frozen=True)
class Orientation:
    """Filter axis in spherical angles with cached direction cosines."""

    theta_deg: float
    phi_deg: float

    @property
    def cosines(self) -> tuple[float, float, float]:
        sin_t, cos_t = _sincos_deg(self.theta_deg)
        sin_p, cos_p = _sincos_deg(self.phi_deg)
        return (cos_t * sin_p, sin_t * sin_p, cos_p)


@dataclass(frozen=True)
class SteerableKernel:
    """Discrete kernel taps indexed [y, x, t]; zero-mean and unit L2 norm."""

    taps: np.ndarray
    order: int
    sigma: float


@dataclass(frozen=True)
class SubbandEntry:
    scale: int
    orientation: Orientation
    coefficients: np.ndarray


@dataclass(frozen=True)
class SubbandStack:
    """All subband coefficient volumes of one patch, scale-major order."""

    subbands: tuple[SubbandEntry, ...]

    def __len__(self) -> int:
        return len(self.subbands)


def make_orientations() -> list[Orientation]:
    """The fixed 9 theta x 5 phi orientation grid, theta-major order."""
    return [Orientation(theta, phi)
            for theta in THETA_DEGREES for phi in PHI_DEGREES]


def _check_params(sigma: float, support: int, order: int) -> None:
    if support < 5 or support % 2 == 0:
        raise ValueError("support must be odd and >= 5")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if order < 1:
        raise ValueError("order must be a positive integer")


def _raw_taps(o: Orientation, sigma: float, order: int,
              support: int) -> np.ndarray:
    half = support // 2
    u = np.arange(-half, half + 1, dtype=np.float64)
    y, x, t = np.meshgrid(u, u, u, indexing="ij")
    a, b, c = o.cosines
    m = a * x + b * y + c * t
    r2 = x * x + y * y + t * t
    herm = nph.hermval(m / sigma, [0.0] * order + [1.0])
    return np.exp(-r2 / (2.0 * sigma * sigma)) * herm


def build_kernel(o: Orientation, sigma: float = DEFAULT_SIGMA,
                 order: int = DEFAULT_ORDER,
                 support: int = DEFAULT_SUPPORT) -> SteerableKernel:
    """Oriented kernel taps on the centered integer lattice."""
    _check_params(sigma, support, order)
    raw = _raw_taps(o, sigma, order, support)
    centered = raw - raw.mean()
    norm = np.linalg.norm(centered)
    if norm == 0.0:
        raise ValueError("degenerate kernel (zero after DC removal)")
    return SteerableKernel(taps=centered / norm, order=order, sigma=sigma)


def _hermite_power_coeffs(order: int) -> np.ndarray:
    """Power-series coefficients of the physicists' Hermite H_order."""
    return nph.herm2poly([0.0] * order + [1.0])


def _monomial_weights(o: Orientation, sigma: float,
                      order: int) -> dict[tuple[int, int, int], float]:
    """Expand H_order(m/sigma), m = a*x + b*y + c*t, into x^i y^j t^k terms."""
    a, b, c = o.cosines
    poly = _hermite_power_coeffs(order)
    weights: dict[tuple[int, int, int], float] = {}
    for d, coeff in enumerate(poly):
        if coeff == 0.0:
            continue
        scale = coeff / sigma ** d
        for i in range(d + 1):
            for j in range(d - i + 1):
                k = d - i - j
                mult = math.factorial(d) // (math.factorial(i)
                                             * math.factorial(j)
                                             * math.factorial(k))
                w = scale * mult * (a ** i) * (b ** j) * (c ** k)
                if w != 0.0:
                    weights[(i, j, k)] = weights.get((i, j, k), 0.0) + w
    return weights


def _sep_correlate(volume: np.ndarray, fx: np.ndarray, fy: np.ndarray,
                   ft: np.ndarray) -> np.ndarray:
    # Symmetric padding spatially, clamp padding temporally.
    out = correlate1d(volume, fy, axis=0, mode="reflect")
    out = correlate1d(out, fx, axis=1, mode="reflect")
    return correlate1d(out, ft, axis=2, mode="nearest")


class _BasisResponses:
    """Separable monomial-basis responses of one volume, computed on demand."""

    def __init__(self, volume: np.ndarray, sigma: float, support: int,
                 order: int):
        half = support // 2
        u = np.arange(-half, half + 1, dtype=np.float64)
        g = np.exp(-u * u / (2.0 * sigma * sigma))
        self._factors = {p: g * u ** p for p in range(order + 1)}
        self._ones = np.ones(support)
        self._volume = volume
        self._cache: dict[tuple[int, int, int], np.ndarray] = {}
        self._box: np.ndarray | None = None

    def monomial(self, ijk: tuple[int, int, int]) -> np.ndarray:
        if ijk not in self._cache:
            i, j, k = ijk
            self._cache[ijk] = _sep_correlate(
                self._volume, self._factors[i], self._factors[j],
                self._factors[k])
        return self._cache[ijk]

    def box_sum(self) -> np.ndarray:
        if self._box is None:
            self._box = _sep_correlate(self._volume, self._ones, self._ones,
                                       self._ones)
        return self._box


def _spatial_downsample(volume: np.ndarray) -> np.ndarray:
    blurred = gaussian_filter1d(volume, PYRAMID_BLUR_SIGMA, axis=0,
                                mode="reflect")
    blurred = gaussian_filter1d(blurred, PYRAMID_BLUR_SIGMA, axis=1,
                                mode="reflect")
    return blurred[::2, ::2, :]


def iter_subbands(patch: np.ndarray,
                  orientations: list[Orientation] | None = None,
                  scales: int = NUM_SCALES,
                  sigma: float = DEFAULT_SIGMA,
                  order: int = DEFAULT_ORDER,
                  support: int = DEFAULT_SUPPORT):
    """Yield SubbandEntry items scale-major without retaining the full stack.

    `patch` is a (y, x, t) volume of reals.
    """
    _check_params(sigma, support, order)
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim != 3:
        raise ValueError("patch must be a 3-D (y, x, t) volume")
    if orientations is None:
        orientations = make_orientations()

    min_spatial = min(patch.shape[0], patch.shape[1]) >> (scales - 1)
    if min_spatial < support or patch.shape[2] < support:
        raise ValueError("patch too small for the requested decomposition")

    level = patch
    for scale in range(1, scales + 1):
        basis = _BasisResponses(level, sigma, support, order)
        for o in orientations:
            raw = _raw_taps(o, sigma, order, support)
            raw_mean = raw.mean()
            centered_norm = np.linalg.norm(raw - raw_mean)
            resp = np.zeros_like(level)
            for ijk, w in _monomial_weights(o, sigma, order).items():
                resp += w * basis.monomial(ijk)
            resp -= raw_mean * basis.box_sum()
            resp /= centered_norm
            yield SubbandEntry(scale=scale, orientation=o, coefficients=resp)
        if scale < scales:
            level = _spatial_downsample(level)


def decompose(patch: np.ndarray,
              orientations: list[Orientation] | None = None,
              scales: int = NUM_SCALES,
              sigma: float = DEFAULT_SIGMA,
              order: int = DEFAULT_ORDER,
              support: int = DEFAULT_SUPPORT) -> SubbandStack:
    """Full subband decomposition (scales x orientations) of one patch."""
    entries = tuple(iter_subbands(patch, orientations, scales, sigma, order,
                                  support))
    return SubbandStack(subbands=entries)
