"""Logarithmic energy, discrete minimizers and closed-form equilibrium laws."""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.stats
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .densities import ExternalField, pair_distances, projected_density
from .errors import CoincidentPoints, EmptySamples, UnsupportedAlpha
from .tuples import EigenConfig


class LawKind(enum.Enum):
    SEMICIRCLE = "Semicircle"
    UNIFORM_DISK = "UniformDisk"
    BALL_LAW = "BallLaw"
    SPHERE_UNIFORM = "SphereUniform"


def equilibrium_radius(d: int, gamma: float, alpha: float = 2.0) -> float:
    """Support radius of the equilibrium measure of gamma |x|^alpha on R^d.

    Quadratic fields give sqrt(2/gamma), 1/sqrt(gamma), sqrt(2/(3 gamma)) for
    d = 1, 2, 3 and 1/sqrt(2 gamma) for d >= 4. For d >= 4 and alpha >= 2 the
    law is uniform on a sphere whose radius balances -log r against
    gamma r^alpha, giving (alpha gamma)^(-1/alpha).
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if alpha != 2.0:
        if d >= 4 and alpha >= 2.0:
            return (alpha * gamma) ** (-1.0 / alpha)
        raise UnsupportedAlpha(f"no closed-form radius for d={d}, alpha={alpha}")
    if d == 1:
        return math.sqrt(2.0 / gamma)
    if d == 2:
        return 1.0 / math.sqrt(gamma)
    if d == 3:
        return math.sqrt(2.0 / (3.0 * gamma))
    return 1.0 / math.sqrt(2.0 * gamma)


@dataclass(frozen=True)
class EquilibriumLaw:
    d: int
    gamma: float
    kind: LawKind
    radius: float

    @classmethod
    def gaussian(cls, d: int, gamma: float) -> EquilibriumLaw:
        kind = {1: LawKind.SEMICIRCLE, 2: LawKind.UNIFORM_DISK, 3: LawKind.BALL_LAW}.get(
            d, LawKind.SPHERE_UNIFORM
        )
        return cls(d, gamma, kind, equilibrium_radius(d, gamma))

    def radial_density(self, r):
        """Density of |x| on [0, R] (d >= 2; the sphere law has none)."""
        R = self.radius
        r = np.asarray(r, dtype=float)
        inside = (r >= 0) & (r < R)
        if self.kind is LawKind.UNIFORM_DISK:
            out = 2.0 * r / R**2
        elif self.kind is LawKind.BALL_LAW:
            # Lebesgue density 1/(pi^2 R^2 sqrt(R^2 - |x|^2)) times the shell area 4 pi r^2
            with np.errstate(divide="ignore", invalid="ignore"):
                out = 4.0 * r**2 / (math.pi * R**2 * np.sqrt(R**2 - r**2))
        else:
            raise ValueError(f"no radial density for {self.kind.value}")
        return np.where(inside, out, 0.0)


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    gradient_norm: float
    config: EigenConfig
    converged: bool = True
    iterations: int = 0


def _interaction_weight(n: int, functional: str) -> float:
    if functional == "energy":
        return 1.0 / n
    if functional == "k_n":
        return (n - 1) / n**2
    raise ValueError(f"unknown functional {functional!r}")


def discrete_energy(x, Q: ExternalField) -> float:
    """(1/n^2) sum_{i != j} log(1/|x_i - x_j|) + (1/n) sum_i Q(x_i).

    Equals K_n(x)/n^2 + (1/n^2) sum_i Q(x_i).
    """
    pts = x.points if isinstance(x, EigenConfig) else np.asarray(x)
    n = pts.shape[0]
    dist = pair_distances(pts)
    if np.any(dist == 0):
        raise CoincidentPoints("log energy is infinite at coincident points")
    return float(-2.0 * np.sum(np.log(dist)) / n**2 + np.sum(Q(pts)) / n)


def _energy_and_grad(pts: np.ndarray, Q: ExternalField, field_weight: float):
    n = pts.shape[0]
    sq = np.sum(pts * pts, axis=1)
    r2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.fill_diagonal(r2, 1.0)
    if np.any(r2 <= 0):
        return np.inf, np.zeros_like(pts)
    # log(r2) / 2 = log|x_i - x_j|; the unit diagonal contributes nothing
    energy = -np.sum(np.log(r2)) / (2.0 * n**2) + field_weight * np.sum(Q(pts))
    inv = 1.0 / r2
    np.fill_diagonal(inv, 0.0)
    # sum_j (x_i - x_j) / r2_ij without forming the (n, n, d) difference array
    grad = -(2.0 / n**2) * (pts * inv.sum(axis=1)[:, None] - inv @ pts)
    grad += field_weight * Q.gradient(pts)
    return float(energy), grad


def _descend(pts, Q, field_weight, max_iter, tol):
    energy, grad = _energy_and_grad(pts, Q, field_weight)
    step = 1e-2
    prev_pts = prev_grad = None
    it = 0
    for it in range(1, max_iter + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol:
            return pts, energy, gnorm, True, it
        if prev_pts is not None:
            s = (pts - prev_pts).ravel()
            y = (grad - prev_grad).ravel()
            sy = float(s @ y)
            if sy > 0:
                step = float(s @ s) / sy
        # Armijo backtracking from the Barzilai-Borwein guess
        while True:
            trial = pts - step * grad
            e_trial, g_trial = _energy_and_grad(trial, Q, field_weight)
            if e_trial <= energy - 1e-4 * step * gnorm**2:
                break
            step *= 0.5
            if step < 1e-300:
                return pts, energy, gnorm, False, it
        prev_pts, prev_grad = pts, grad
        pts, energy, grad = trial, e_trial, g_trial
    return pts, energy, float(np.linalg.norm(grad)), False, it


def minimize_energy(
    n: int,
    d: int,
    Q: ExternalField,
    seed=0,
    max_iter: int = 20000,
    tol: float = 1e-8,
    restarts: int = 3,
    functional: str = "energy",
) -> EnergyReport:
    """Minimize the discrete log energy of n points in R^d.

    Gradient descent with Barzilai-Borwein step guesses and Armijo
    backtracking, restarted from ``restarts`` seeds; the lowest energy wins.
    ``functional="k_n"`` minimizes K_n/n^2 instead, whose field weight is
    (n-1)/n^2 rather than 1/n. A run that exhausts ``max_iter`` is returned
    with ``converged=False``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    field_weight = _interaction_weight(n, functional)
    best = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        init = rng.standard_normal((n, d)) / math.sqrt(2.0 * Q.gamma)
        pts, energy, gnorm, ok, it = _descend(init, Q, field_weight, max_iter, tol)
        if best is None or energy < best[1]:
            best = (pts, energy, gnorm, ok, it)
    pts, energy, gnorm, ok, it = best
    return EnergyReport(energy, gnorm, EigenConfig(pts), ok, it)


def _semicircle_cdf(x, R):
    x = np.clip(x, -R, R)
    return 0.5 + (x * np.sqrt(R * R - x * x)) / (math.pi * R * R) + np.arcsin(x / R) / math.pi


@functools.lru_cache(maxsize=None)
def _ball_radius_inverse(R: float, knots: int = 10_000) -> PchipInterpolator:
    # tabulate the radial CDF on r = R sin(phi), where the edge singularity flattens out
    density = EquilibriumLaw(3, 1.0, LawKind.BALL_LAW, R).radial_density
    phi = np.linspace(0.0, math.pi / 2, knots)
    r = R * np.sin(phi)
    cdf = np.zeros(knots)
    integrand = lambda t: density(R * math.sin(t)) * R * math.cos(t)  # noqa: E731
    for k in range(1, knots):
        cdf[k] = cdf[k - 1] + quad(integrand, phi[k - 1], phi[k])[0]
    cdf /= cdf[-1]
    return PchipInterpolator(cdf, r)


def sample_equilibrium(law: EquilibriumLaw, count: int, seed=None) -> np.ndarray:
    """Draw ``count`` points from a closed-form equilibrium law, shape (count, d)."""
    rng = np.random.default_rng(seed)
    R = law.radius
    d = law.d
    if law.kind is LawKind.SEMICIRCLE:
        u = rng.random(count)
        lo = np.full(count, -R)
        hi = np.full(count, R)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = _semicircle_cdf(mid, R) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return (0.5 * (lo + hi))[:, None]
    if law.kind is LawKind.UNIFORM_DISK:
        r = R * np.sqrt(rng.random(count))
        theta = 2.0 * math.pi * rng.random(count)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    direction = rng.standard_normal((count, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    if law.kind is LawKind.SPHERE_UNIFORM:
        return R * direction
    r = _ball_radius_inverse(R)(rng.random(count))
    return r[:, None] * direction


def ks_distance_1d(samples, cdf) -> float:
    """Sup-norm distance between the empirical CDF of ``samples`` and ``cdf``."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise EmptySamples("KS distance needs at least one sample")
    return float(scipy.stats.kstest(samples, cdf).statistic)


def axis_projection(points) -> np.ndarray:
    """First coordinate of each point."""
    return np.asarray(points)[:, 0]


@functools.lru_cache(maxsize=None)
def projected_cdf(d: int, gamma: float, knots: int = 4001):
    """CDF of the projected density f_d, tabulated by adaptive quadrature."""
    R = projected_support(d, gamma)
    # cosine spacing crowds knots toward the endpoints
    grid = -R * np.cos(np.linspace(0.0, math.pi, knots))
    values = np.zeros(knots)
    f = lambda x: projected_density(d, gamma, x)  # noqa: E731
    for k in range(1, knots):
        values[k] = values[k - 1] + quad(f, grid[k - 1], grid[k], epsabs=1e-14)[0]
    interp = PchipInterpolator(grid, values)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= -R, 0.0, np.where(x >= R, 1.0, interp(np.clip(x, -R, R))))

    return cdf


def projected_support(d: int, gamma: float) -> float:
    return equilibrium_radius(d, gamma)


def law_cdf_1d(law: EquilibriumLaw):
    """Closed-form CDF of a one-dimensional (semicircle) law."""
    if law.kind is not LawKind.SEMICIRCLE:
        raise ValueError("only the semicircle law is one-dimensional")
    return lambda x: _semicircle_cdf(np.asarray(x, dtype=float), law.radius)
