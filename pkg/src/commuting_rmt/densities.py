"""Closed-form eigenvalue densities and energy functionals.

All densities are unnormalized log-values. Vectorized kernels take point
arrays of shape (..., n, d) and return arrays of shape (...); the public
operations wrap them for a single :class:`EigenConfig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CoincidentPoints
from .tuples import EigenConfig


@dataclass(frozen=True)
class ExternalField:
    """Radial confining potential Q(x) = gamma * |x|^alpha on R^d or C^d."""

    gamma: float
    alpha: float = 2.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def __call__(self, x) -> np.ndarray:
        """Evaluate Q on points given along the last axis."""
        r2 = np.sum(np.abs(np.asarray(x)) ** 2, axis=-1)
        if self.alpha == 2.0:
            return self.gamma * r2
        return self.gamma * r2 ** (self.alpha / 2)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient of Q for real points, same shape as ``x``."""
        x = np.asarray(x, dtype=float)
        if self.alpha == 2.0:
            return 2.0 * self.gamma * x
        r2 = np.sum(x * x, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 > 0, r2 ** (self.alpha / 2 - 1), 0.0)
        return self.gamma * self.alpha * w * x


@dataclass(frozen=True)
class DensityReport:
    log_value: float
    finite_flag: bool


def _points(cfg) -> np.ndarray:
    return cfg.points if isinstance(cfg, EigenConfig) else np.asarray(cfg)


def pair_distances(points: np.ndarray) -> np.ndarray:
    """Euclidean distances |p_i - p_j| for i < j, shape (..., n(n-1)/2)."""
    n = points.shape[-2]
    i, j = np.triu_indices(n, 1)
    diff = points[..., i, :] - points[..., j, :]
    return np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))


def pair_log_sum(points: np.ndarray) -> np.ndarray:
    """sum_{i<j} log |p_i - p_j|; -inf where two points coincide."""
    with np.errstate(divide="ignore"):
        return np.sum(np.log(pair_distances(points)), axis=-1)


def log_gas(points: np.ndarray, Q: ExternalField, coupling: float = 1.0) -> np.ndarray:
    """-coupling * sum_j Q(p_j) + 2 sum_{i<j} log|p_i - p_j| for batched points."""
    points = np.asarray(points)
    return -coupling * np.sum(Q(points), axis=-1) + 2.0 * pair_log_sum(points)


def _report(value) -> DensityReport:
    value = float(value)
    return DensityReport(value, bool(np.isfinite(value)))


def log_ginibre_density(lam, Q: ExternalField) -> DensityReport:
    """Unnormalized log-density of joint eigenvalues of a random commuting
    Hermitian tuple with weight exp(-tr Q(X)).

    The repulsion is the squared Euclidean distance in R^d, not a product
    over components.
    """
    return _report(log_gas(_points(lam), Q, 1.0))


def log_scaled_density(y, Q: ExternalField) -> DensityReport:
    """Log-density of the rescaled ensemble, with exp(-n sum Q) confinement."""
    pts = _points(y)
    return _report(log_gas(pts, Q, float(pts.shape[-2])))


class LogGas:
    """Vectorized log-gas target: -coupling * sum Q + 2 sum_{i<j} log|p_i - p_j|.

    Besides full evaluation it exposes ``site_delta`` so single-site samplers
    pay O(n) per update instead of O(n^2).
    """

    def __init__(self, Q: ExternalField, coupling: float = 1.0):
        self.Q = Q
        self.coupling = float(coupling)

    @classmethod
    def ginibre(cls, Q: ExternalField) -> LogGas:
        return cls(Q, 1.0)

    @classmethod
    def scaled(cls, Q: ExternalField, n: int) -> LogGas:
        return cls(Q, float(n))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return log_gas(points, self.Q, self.coupling)

    def site_delta(self, points: np.ndarray, i: int, new: np.ndarray) -> np.ndarray:
        """Change in log-density when point ``i`` moves to ``new``.

        ``points`` has shape (chains, n, d) and ``new`` shape (chains, d).
        """
        old = points[:, i, :]
        others = np.delete(points, i, axis=1)
        d_new = np.sum(np.abs(others - new[:, None, :]) ** 2, axis=-1)
        d_old = np.sum(np.abs(others - old[:, None, :]) ** 2, axis=-1)
        with np.errstate(divide="ignore"):
            pair = np.sum(np.log(d_new) - np.log(d_old), axis=-1)
        return -self.coupling * (self.Q(new) - self.Q(old)) + pair


def k_n_functional(y, Q: ExternalField) -> float:
    """K_n(y) = sum_{i<j} log |y_i - y_j|^-2 + (n - 1) sum_i Q(y_i)."""
    pts = _points(y)
    n = pts.shape[-2]
    dist = pair_distances(pts)
    if np.any(dist == 0):
        raise CoincidentPoints("K_n is undefined at coincident points")
    return float(-2.0 * np.sum(np.log(dist)) + (n - 1) * np.sum(Q(pts)))


def k_n_batch(points: np.ndarray, Q: ExternalField) -> np.ndarray:
    """K_n over a batch of configurations, shape (..., n, d) -> (...)."""
    n = points.shape[-2]
    return -2.0 * pair_log_sum(points) + (n - 1) * np.sum(Q(points), axis=-1)


def _rho_2x2_log_coeffs(d: int, gamma: float) -> np.ndarray:
    # log of 2^j / ((d-1-j)! gamma^(j+1)), j = 0..d-1
    j = np.arange(d)
    return j * math.log(2.0) - gammaln(d - j) - (j + 1) * math.log(gamma)


def log_rho_2x2_array(lambda1, lambda2, d: int, gamma: float) -> np.ndarray:
    """Vectorized unnormalized log-density of the eigenvalue pair of a random
    commuting d-tuple of 2 x 2 matrices with Gaussian weight exp(-gamma ||X||_F^2).

    ``lambda1`` and ``lambda2`` have shape (..., d) and may be complex.
    """
    l1 = np.asarray(lambda1)
    l2 = np.asarray(lambda2)
    gauss = -gamma * (np.sum(np.abs(l1) ** 2, axis=-1) + np.sum(np.abs(l2) ** 2, axis=-1))
    s2 = np.sum(np.abs(l2 - l1) ** 2, axis=-1)
    coeffs = _rho_2x2_log_coeffs(d, gamma)
    powers = 1 - np.arange(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_s2 = np.log(s2)[..., None]
        terms = coeffs + powers * log_s2
        # the j = 1 term is s2-free; keep it finite when s2 = 0
        terms = np.where(powers == 0, coeffs, terms)
    return gauss + logsumexp(terms, axis=-1)


def log_rho_2x2(lambda1, lambda2, d: int, gamma: float) -> DensityReport:
    """Unnormalized log-density of the joint eigenvalues (lambda1, lambda2) in (C^d)^2.

    At lambda1 = lambda2 the value is -inf for d = 1, finite for d = 2 and
    +inf for d >= 3; the last reflects attraction between the eigenvalues.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    l1 = np.asarray(lambda1, dtype=complex).reshape(d)
    l2 = np.asarray(lambda2, dtype=complex).reshape(d)
    return _report(log_rho_2x2_array(l1, l2, d, gamma))


def radial_integral(d: int, k: float) -> float:
    """Closed form of int_0^inf exp(-k r^2) (1 + 2 r^2)^(d-1) r dr.

    Binomial expansion of (1 + 2r^2)^(d-1) followed by
    int_0^inf r^(2j+1) exp(-k r^2) dr = j! / (2 k^(j+1)).
    """
    if not k > 0:
        raise ValueError("k must be positive")
    total = 0.0
    for j in range(d):
        total += math.comb(d - 1, j) * 2.0**j * math.factorial(j) / (2.0 * k ** (j + 1))
    return total


def projected_density(d: int, gamma: float, x):
    """Density of the first coordinate under the equilibrium law for gamma |x|^2.

    Semicircle of radius R_d for d <= 3, and a (R_d^2 - x^2)^((d-3)/2) law for
    d >= 4 (still a semicircle at d = 4). Zero outside [-R_d, R_d].
    """
    from .equilibrium import equilibrium_radius

    R = equilibrium_radius(d, gamma)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < R
    gap = np.where(inside, R * R - x * x, 0.0)
    if d <= 3:
        out = 2.0 / (math.pi * R * R) * np.sqrt(gap)
    else:
        const = math.exp(gammaln(d / 2) - gammaln((d - 1) / 2)) / (math.sqrt(math.pi) * R ** (d - 2))
        out = const * np.sqrt(gap) ** (d - 3)
    out = np.where(inside, out, 0.0)
    return float(out) if out.ndim == 0 else out
